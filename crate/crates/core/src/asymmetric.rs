//! Asymmetric hypothesis-testing comparison: the trace coefficients of the
//! two-parameter effect family, the resulting two-variable linear program
//! (analytic and brute-force), the optimal type-II error curve and the
//! symmetric/asymmetric tradeoff relation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::symmetric::p_success;
use crate::Kind;

/// Trace coefficients of the LP: `p_I = 1 − (α t_A + β t_S)` and
/// `p_II = c_A t_A + c_S t_S`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LpCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub c_a: f64,
    pub c_s: f64,
}

/// A solution of the asymmetric LP at a given type-I error budget.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TradeoffPoint {
    pub epsilon: f64,
    pub p2_star: f64,
    pub t_a: f64,
    pub t_s: f64,
}

/// Coefficients for the swap-diagonal (channels) or T-diagonal (POVM) effect
/// family, evaluated on the antisymmetric-input averaged output states.
pub fn coefficients(kind: Kind, d_out: usize, env: usize) -> Result<LpCoefficients> {
    if d_out * env == 1 || (kind == Kind::Channel && d_out < 2) || d_out < 2 {
        if d_out * env == 1 {
            return Err(Error::DegenerateEnsemble);
        }
        return Err(Error::Precondition("coefficients need d_out >= 2".into()));
    }
    let d_o = d_out as f64;
    let s = env as f64;
    Ok(match kind {
        Kind::Channel => LpCoefficients {
            alpha: (s + 1.0) * (d_o - 1.0) / (2.0 * (s * d_o - 1.0)),
            beta: (s - 1.0) * (d_o + 1.0) / (2.0 * (s * d_o - 1.0)),
            c_a: (d_o - 1.0) / (2.0 * d_o),
            c_s: (d_o + 1.0) / (2.0 * d_o),
        },
        Kind::Povm => LpCoefficients {
            alpha: s * (d_o - 1.0) / (s * d_o - 1.0),
            beta: (s - 1.0) / (s * d_o - 1.0),
            c_a: (d_o - 1.0) / d_o,
            c_s: 1.0 / d_o,
        },
    })
}

/// Analytic solution of
/// `min c_A t_A + c_S t_S  s.t.  α t_A + β t_S ≥ 1−ε,  t ∈ [0,1]²`.
///
/// Valid under the cost-effectiveness ordering `c_S/β > c_A/α` (β = 0 counts
/// as infinitely expensive `t_S`): spend `t_A` first, then top up with `t_S`.
pub fn lp_solve(c: &LpCoefficients, epsilon: f64) -> Result<TradeoffPoint> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Precondition(format!("epsilon {epsilon} outside [0, 1]")));
    }
    if c.beta > 0.0 && c.c_s * c.alpha <= c.c_a * c.beta {
        return Err(Error::Precondition(
            "coefficients violate the ordering c_S/beta > c_A/alpha".into(),
        ));
    }
    let need = 1.0 - epsilon;
    let (t_a, t_s) = if c.alpha >= need {
        ((need / c.alpha).min(1.0).max(0.0), 0.0)
    } else if c.beta > 0.0 {
        let t_s = (need - c.alpha) / c.beta;
        if t_s > 1.0 + 1e-12 {
            return Err(Error::Infeasible(format!(
                "alpha + beta = {} cannot reach 1 - epsilon = {need}",
                c.alpha + c.beta
            )));
        }
        (1.0, t_s.min(1.0))
    } else {
        return Err(Error::Infeasible(
            "beta = 0 and alpha < 1 - epsilon: no feasible effect".into(),
        ));
    };
    Ok(TradeoffPoint {
        epsilon,
        p2_star: c.c_a * t_a + c.c_s * t_s,
        t_a,
        t_s,
    })
}

/// Brute-force LP oracle: exhaustive search over the `(t_A, t_S)` grid plus
/// the constraint-boundary line. Independent of [`lp_solve`]; agrees with it
/// to `O(1/grid_n)` in objective.
pub fn lp_brute(c: &LpCoefficients, epsilon: f64, grid_n: usize) -> Result<TradeoffPoint> {
    if grid_n < 100 {
        return Err(Error::Precondition("brute-force grid must have at least 100 points".into()));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Precondition(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let need = 1.0 - epsilon;
    let feasible = |t_a: f64, t_s: f64| c.alpha * t_a + c.beta * t_s >= need - 1e-12;
    let mut best: Option<TradeoffPoint> = None;
    let mut consider = |t_a: f64, t_s: f64| {
        if !(0.0..=1.0).contains(&t_a) || !(0.0..=1.0).contains(&t_s) || !feasible(t_a, t_s) {
            return;
        }
        let obj = c.c_a * t_a + c.c_s * t_s;
        if best.map_or(true, |b| obj < b.p2_star) {
            best = Some(TradeoffPoint { epsilon, p2_star: obj, t_a, t_s });
        }
    };
    let step = 1.0 / grid_n as f64;
    for i in 0..=grid_n {
        let t_a = i as f64 * step;
        for j in 0..=grid_n {
            consider(t_a, j as f64 * step);
        }
        // boundary line points at this t_a and t_s
        if c.beta > 0.0 {
            consider(t_a, (need - c.alpha * t_a) / c.beta);
        }
        if c.alpha > 0.0 {
            let t_s = t_a; // reuse the grid coordinate for the other axis
            consider((need - c.beta * t_s) / c.alpha, t_s);
        }
    }
    best.ok_or_else(|| Error::Infeasible("no feasible grid point".into()))
}

/// Optimal type-II error at type-I budget ε.
///
/// Piecewise linear: for `ε < 1−α` the slope is `(s·d_o−1)/(d_o(s−1))` for
/// both kinds; for `ε ≥ 1−α` the value is `c_A(1−ε)/α`, which continues to
/// decrease as the constraint relaxes.
pub fn p2_star(kind: Kind, d_out: usize, env: usize, epsilon: f64) -> Result<f64> {
    let c = coefficients(kind, d_out, env)?;
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Precondition(format!("epsilon {epsilon} outside [0, 1]")));
    }
    let d_o = d_out as f64;
    let s = env as f64;
    Ok(if epsilon >= 1.0 - c.alpha {
        c.c_a * (1.0 - epsilon) / c.alpha
    } else {
        // ε < 1−α requires s ≥ 2, so the (s−1) denominator is safe
        let slope = (s * d_o - 1.0) / (d_o * (s - 1.0));
        match kind {
            Kind::Channel => c.c_a + slope * (1.0 - epsilon - c.alpha),
            Kind::Povm => 1.0 - slope * epsilon,
        }
    })
}

/// Tradeoff relation between the asymmetric errors and the symmetric success
/// probability: returns `(ε_sat, lhs, rhs, residual)` where `ε_sat = 1−α`,
/// `lhs = (p_I + p_II)/2` at the LP optimum for `ε_sat`, and
/// `rhs = 1 − p_success`. The relation `lhs ≥ rhs` saturates exactly at
/// `ε_sat`.
pub fn tradeoff_relation(kind: Kind, d_out: usize, env: usize) -> Result<(f64, f64, f64, f64)> {
    let c = coefficients(kind, d_out, env)?;
    let eps_sat = 1.0 - c.alpha;
    let point = lp_solve(&c, eps_sat)?;
    let p1 = 1.0 - (c.alpha * point.t_a + c.beta * point.t_s);
    let lhs = 0.5 * (p1 + point.p2_star);
    let rhs = 1.0 - p_success(kind, d_out, env)?;
    Ok((eps_sat, lhs, rhs, (lhs - rhs).abs()))
}
