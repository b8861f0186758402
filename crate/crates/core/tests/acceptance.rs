//! Acceptance gate: one test per criterion, each printing a single
//! `criterion N (name): pass|fail` line. Run with `--nocapture` to see the
//! lines on success.

use haarcmp_core::asymmetric::{coefficients, lp_brute, lp_solve, p2_star, tradeoff_relation};
use haarcmp_core::choi::{diamond_bound, diff_operator, verify_polar};
use haarcmp_core::ensembles::{stream, ComparisonDims, RngSeed};
use haarcmp_core::montecarlo::{estimate_avg_choi, estimate_success, Mode};
use haarcmp_core::symmetric::{
    optimal_strategy_success, p_success, p_success_channels, saturation_check,
};
use haarcmp_core::Kind;
use rand::Rng;

fn report(n: usize, name: &str, ok: bool, detail: &str) {
    println!("criterion {n} ({name}): {}", if ok { "pass" } else { "fail" });
    assert!(ok, "criterion {n} ({name}) failed: {detail}");
}

/// The (d_in, d_out, env) verification grid, restricted to valid triples.
fn grid() -> Vec<ComparisonDims> {
    let mut out = Vec::new();
    for d_in in [1, 2, 3] {
        for d_out in [2, 3] {
            for env in [1, 2, 3] {
                if let Ok(d) = ComparisonDims::new(d_in, d_out, env) {
                    out.push(d);
                }
            }
        }
    }
    out
}

#[test]
fn criterion_1_unitary_landmark() {
    let p = p_success_channels(2, 1).unwrap();
    report(1, "unitary landmark", (p - 0.875).abs() <= 1e-12, &format!("p = {p}"));
}

#[test]
fn criterion_2_diamond_value_identity() {
    let mut worst = 0.0f64;
    for d in grid() {
        let j = diff_operator(Kind::Channel, d).unwrap();
        let bound = diamond_bound(&j).unwrap();
        let d_o = d.d_out as f64;
        let s = d.env as f64;
        // the -1 swap eigenvalue needs d_in >= 2; at d_in = 1 the bound is
        // the trivial-input value 4(p_trivial - 1/2)
        let expected = if d.d_in >= 2 {
            (d_o * d_o - 1.0) / (d_o * d_o * s - d_o)
        } else {
            (d_o * d_o - 1.0) / (d_o * (s * d_o + 1.0))
        };
        worst = worst.max((bound - expected).abs());
    }
    report(2, "diamond value identity", worst <= 1e-10, &format!("max deviation {worst:.3e}"));
}

#[test]
fn criterion_3_polar_verification() {
    let mut worst = 0.0f64;
    for d in grid() {
        worst = worst.max(verify_polar(d).unwrap());
    }
    report(3, "polar verification", worst <= 1e-10, &format!("max residual {worst:.3e}"));
}

#[test]
fn criterion_4_saturation() {
    let mut worst = 0.0f64;
    for d in grid().into_iter().filter(|d| d.d_in >= 2) {
        let (numeric, closed, residual) = saturation_check(d).unwrap();
        worst = worst.max(residual);
        assert!(numeric.is_finite() && closed.is_finite());
    }
    report(4, "saturation", worst <= 1e-10, &format!("max residual {worst:.3e}"));
}

#[test]
fn criterion_5_strategy_achievability() {
    let mut worst = 0.0f64;
    for kind in [Kind::Channel, Kind::Povm] {
        for d_out in 2..=6usize {
            for env in 1..=4usize {
                let dims = ComparisonDims::new(2, d_out, env).unwrap();
                let achieved = optimal_strategy_success(kind, dims).unwrap().p_success;
                let closed = p_success(kind, d_out, env).unwrap();
                worst = worst.max((achieved - closed).abs());
            }
        }
    }
    report(5, "strategy achievability", worst <= 1e-12, &format!("max deviation {worst:.3e}"));
}

#[test]
fn criterion_6_monte_carlo_concordance() {
    const N: usize = 20_000;
    let mut worst = 0.0f64;
    let mut seed = 1000u64;
    for d in [ComparisonDims::new(2, 2, 1).unwrap(), ComparisonDims::new(2, 2, 2).unwrap()] {
        for kind in [Kind::Channel, Kind::Povm] {
            for mode in [Mode::Same, Mode::Different] {
                let r = estimate_avg_choi(kind, mode, d, N, RngSeed(seed)).unwrap();
                worst = worst.max(r.z_max);
                seed += 1;
            }
            let r = estimate_success(kind, d, N, RngSeed(seed)).unwrap();
            worst = worst.max(r.z_max);
            seed += 1;
        }
    }
    report(6, "Monte Carlo concordance", worst <= 4.0, &format!("max z = {worst:.3}"));
}

#[test]
fn criterion_7_lp_arbitration() {
    let mut worst = 0.0f64;
    let mut rng = stream(RngSeed(2024), 0);
    for _ in 0..200 {
        let kind = if rng.gen_bool(0.5) { Kind::Channel } else { Kind::Povm };
        let d_o = rng.gen_range(2..=6usize);
        let s = rng.gen_range(1..=4usize);
        let eps: f64 = rng.gen_range(0.0..=1.0);
        let c = coefficients(kind, d_o, s).unwrap();
        let exact = lp_solve(&c, eps).unwrap().p2_star;
        let brute = lp_brute(&c, eps, 1000).unwrap().p2_star;
        worst = worst.max((exact - brute).abs());
    }
    let slope_value = p2_star(Kind::Channel, 2, 2, 0.25).unwrap();
    let povm_beta = coefficients(Kind::Povm, 3, 2).unwrap().beta;
    let ok = worst <= 2e-3
        && (slope_value - 0.625).abs() <= 1e-12
        && (povm_beta - 1.0 / 5.0).abs() <= 1e-12;
    report(
        7,
        "LP arbitration",
        ok,
        &format!("max brute deviation {worst:.3e}, p2*(0.25) = {slope_value}, beta = {povm_beta}"),
    );
}

#[test]
fn criterion_8_tradeoff_saturation() {
    let mut ok = true;
    let mut detail = String::new();
    for kind in [Kind::Channel, Kind::Povm] {
        for d_out in [2usize, 3] {
            for env in [1usize, 2, 3] {
                let (eps_sat, _, _, residual) = tradeoff_relation(kind, d_out, env).unwrap();
                if residual > 1e-12 {
                    ok = false;
                    detail = format!("{kind} ({d_out},{env}): residual {residual:.3e}");
                }
                let c = coefficients(kind, d_out, env).unwrap();
                let rhs = 1.0 - p_success(kind, d_out, env).unwrap();
                for eps in [0.9 * eps_sat, 1.1 * eps_sat] {
                    // perturbed points that coincide with the saturation point
                    // (eps_sat = 0) sit on the equality case by construction
                    if !(0.0..=1.0).contains(&eps) || (eps - eps_sat).abs() < 1e-15 {
                        continue;
                    }
                    let point = lp_solve(&c, eps).unwrap();
                    let p1 = 1.0 - (c.alpha * point.t_a + c.beta * point.t_s);
                    let margin = 0.5 * (p1 + point.p2_star) - rhs;
                    if margin <= 1e-9 {
                        ok = false;
                        detail = format!("{kind} ({d_out},{env}) eps={eps}: margin {margin:.3e}");
                    }
                }
            }
        }
    }
    report(8, "tradeoff saturation", ok, &detail);
}

#[test]
fn criterion_9_known_result_recoveries() {
    let mut worst = 0.0f64;
    for d_out in 2..=6usize {
        let d = d_out as f64;
        let ch = p2_star(Kind::Channel, d_out, 1, 0.0).unwrap();
        let pv = p2_star(Kind::Povm, d_out, 1, 0.0).unwrap();
        worst = worst.max((ch - (d - 1.0) / (2.0 * d)).abs());
        worst = worst.max((pv - (1.0 - 1.0 / d)).abs());
    }
    report(9, "known-result recoveries", worst <= 1e-12, &format!("max deviation {worst:.3e}"));
}
