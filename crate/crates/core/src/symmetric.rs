//! Closed-form symmetric comparison: Holevo-Helstrom success probabilities
//! for channels and POVMs, the averaged output states, the optimal
//! antisymmetric-input strategy and the saturation check.

use num_complex::Complex64;
use serde::Serialize;

use crate::choi::{diff_operator, trace_out_inputs};
use crate::ensembles::ComparisonDims;
use crate::error::{Error, Result};
use crate::matcore::{
    dephased_swap, kron, swap_operator, trace_norm, ComplexMatrix, HermitianOperator,
};
use crate::Kind;

/// Closed-form success probability with its achieving strategy descriptor.
#[derive(Clone, Debug, Serialize)]
pub struct SuccessReport {
    pub kind: Kind,
    pub dims: ComparisonDims,
    pub p_success: f64,
    pub strategy: String,
}

/// Probability distribution over environment dimensions.
#[derive(Clone, Debug)]
pub struct EnvDistribution {
    support: Vec<(usize, f64)>,
}

impl EnvDistribution {
    pub fn new(support: Vec<(usize, f64)>) -> Result<Self> {
        let total: f64 = support.iter().map(|&(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("weights sum to {total}, expected 1")));
        }
        if support.iter().any(|&(s, w)| s == 0 || w < 0.0) {
            return Err(Error::Precondition("invalid environment distribution support".into()));
        }
        Ok(Self { support })
    }

    pub fn point_mass(s: usize) -> Self {
        Self { support: vec![(s, 1.0)] }
    }

    pub fn support(&self) -> &[(usize, f64)] {
        &self.support
    }
}

fn guard(d_out: usize, env: usize) -> Result<()> {
    if d_out * env == 1 {
        return Err(Error::DegenerateEnsemble);
    }
    Ok(())
}

/// Symmetric success probability for channel comparison:
/// `1/2 + (1/4)(d_o²−1)/(d_o²s−d_o)`.
pub fn p_success_channels(d_out: usize, env: usize) -> Result<f64> {
    guard(d_out, env)?;
    let d_o = d_out as f64;
    let s = env as f64;
    Ok(0.5 + 0.25 * (d_o * d_o - 1.0) / (d_o * d_o * s - d_o))
}

/// Symmetric success probability for POVM comparison:
/// `1/2 + (1/2)(d_o−1)/(d_o(s·d_o−1))`.
///
/// A single-outcome POVM (`d_out = 1`) carries no information, so the value
/// is 1/2 rather than an error.
pub fn p_success_povm(d_out: usize, env: usize) -> Result<f64> {
    if d_out == 1 {
        return Ok(0.5);
    }
    guard(d_out, env)?;
    let d_o = d_out as f64;
    let s = env as f64;
    Ok(0.5 + 0.5 * (d_o - 1.0) / (d_o * (s * d_o - 1.0)))
}

pub fn p_success(kind: Kind, d_out: usize, env: usize) -> Result<f64> {
    match kind {
        Kind::Channel => p_success_channels(d_out, env),
        Kind::Povm => p_success_povm(d_out, env),
    }
}

/// Success probability for the trivial input space `d_in = 1` (state
/// comparison): `1/2 + (1/4)(d_o²−1)/(d_o(d_o s+1))`.
pub fn p_success_trivial_input(d_out: usize, env: usize) -> f64 {
    let d_o = d_out as f64;
    let s = env as f64;
    0.5 + 0.25 * (d_o * d_o - 1.0) / (d_o * (d_o * s + 1.0))
}

/// Success probability averaged over a distribution of environment sizes.
pub fn averaged_p(kind: Kind, d_out: usize, pi: &EnvDistribution) -> Result<f64> {
    let d_o = d_out as f64;
    let mut expect = 0.0;
    for &(s, w) in pi.support() {
        if s * d_out == 1 {
            return Err(Error::DegenerateEnsemble);
        }
        expect += w / ((s * d_out) as f64 - 1.0);
    }
    Ok(match kind {
        Kind::Channel => 0.5 + 0.25 * (d_o * d_o - 1.0) / d_o * expect,
        Kind::Povm => 0.5 + 0.5 * (d_o - 1.0) / d_o * expect,
    })
}

/// The optimal comparison input: the two-qubit singlet
/// `(|01⟩−|10⟩)/√2` embedded in `ℂ^{d_i} ⊗ ℂ^{d_i}` as a projector.
pub fn antisym_state(d_in: usize) -> Result<HermitianOperator> {
    if d_in < 2 {
        return Err(Error::Precondition(
            "the antisymmetric input state needs d_in >= 2".into(),
        ));
    }
    let dim = d_in * d_in;
    let mut psi = vec![Complex64::ZERO; dim];
    let inv = 1.0 / 2f64.sqrt();
    psi[1] = Complex64::new(inv, 0.0); // |01>
    psi[d_in] = Complex64::new(-inv, 0.0); // |10>
    let m = ComplexMatrix::from_fn(dim, dim, |r, c| psi[r] * psi[c].conj());
    HermitianOperator::new(m)
}

/// Averaged output state for identical boxes applied to an input with swap
/// expectation `s_expect = ⟨ψ|S|ψ⟩`.
pub fn rho_identical(kind: Kind, dims: ComparisonDims, s_expect: f64) -> Result<HermitianOperator> {
    guard(dims.d_out, dims.env)?;
    if !(-1.0..=1.0).contains(&s_expect) {
        return Err(Error::Precondition("swap expectation must lie in [-1, 1]".into()));
    }
    let d_o = dims.d_out as f64;
    let s = dims.env as f64;
    let denom = d_o * (s * s * d_o * d_o - 1.0);
    let id_coeff = s * (s * d_o - s_expect) / denom;
    let op_coeff = (s * d_o * s_expect - 1.0) / denom;
    let structured = match kind {
        Kind::Channel => swap_operator(dims.d_out),
        Kind::Povm => dephased_swap(dims.d_out),
    };
    let m = ComplexMatrix::identity(dims.d_out * dims.d_out)
        .scale_re(id_coeff)
        .add(&structured.matrix().scale_re(op_coeff));
    HermitianOperator::new(m)
}

/// Averaged output state for independent boxes: maximally mixed on `d_o²`.
pub fn rho_different(d_out: usize) -> HermitianOperator {
    let dim = d_out * d_out;
    HermitianOperator::new(ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64))
        .expect("scaled identity is Hermitian")
}

/// The accept-"identical" effect of the optimal strategy:
/// the antisymmetric projector `(I−S)/2` for channels, `I−T` for POVMs.
pub fn accept_effect(kind: Kind, d_out: usize) -> ComplexMatrix {
    let dim = d_out * d_out;
    match kind {
        Kind::Channel => ComplexMatrix::identity(dim)
            .sub(swap_operator(d_out).matrix())
            .scale_re(0.5),
        Kind::Povm => ComplexMatrix::identity(dim).sub(dephased_swap(d_out).matrix()),
    }
}

/// Success probability of the explicit antisymmetric-input strategy,
/// `(1/2)·Tr(Ω ρ_id) + (1/2)·Tr((I−Ω) ρ_dif)`; equals the closed-form bound.
pub fn optimal_strategy_success(kind: Kind, dims: ComparisonDims) -> Result<SuccessReport> {
    if dims.d_in < 2 {
        return Err(Error::Precondition("strategy evaluation needs d_in >= 2".into()));
    }
    let rho_id = rho_identical(kind, dims, -1.0)?;
    let rho_dif = rho_different(dims.d_out);
    let omega = accept_effect(kind, dims.d_out);
    let complement = ComplexMatrix::identity(dims.d_out * dims.d_out).sub(&omega);
    let p = 0.5 * omega.mul(rho_id.matrix()).trace().re
        + 0.5 * complement.mul(rho_dif.matrix()).trace().re;
    let strategy = match kind {
        Kind::Channel => "antisymmetric singlet input; accept on the antisymmetric projector",
        Kind::Povm => "antisymmetric singlet input; accept on unequal outcomes (I - T)",
    };
    Ok(SuccessReport { kind, dims, p_success: p, strategy: strategy.to_string() })
}

/// Achievability check: trace norm of `Tr_in[J(I ⊗ ρᵀ)]` with the
/// antisymmetric input against the closed-form reference
/// `(d_o²−1)/(d_o(d_o s−1))`.
pub fn saturation_check(dims: ComparisonDims) -> Result<(f64, f64, f64)> {
    if dims.d_in < 2 {
        return Err(Error::Precondition("saturation check needs d_in >= 2".into()));
    }
    let j = diff_operator(Kind::Channel, dims)?;
    let rho = antisym_state(dims.d_in)?;
    let widened = kron(
        &ComplexMatrix::identity(dims.d_out * dims.d_out),
        &rho.matrix().transpose(),
    )?;
    let product = j.matrix.matrix().mul(&widened);
    let reduced = trace_out_inputs(&j, &product)?;
    let value = trace_norm(&reduced)?;
    let d_o = dims.d_out as f64;
    let s = dims.env as f64;
    let reference = (d_o * d_o - 1.0) / (d_o * (d_o * s - 1.0));
    Ok((value, reference, (value - reference).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::herm_eig;
    use approx::assert_abs_diff_eq;

    fn dims(d_in: usize, d_out: usize, env: usize) -> ComparisonDims {
        ComparisonDims::new(d_in, d_out, env).unwrap()
    }

    #[test]
    fn channel_success_landmarks() {
        assert_abs_diff_eq!(p_success_channels(2, 1).unwrap(), 0.875, epsilon = 1e-15);
        assert_abs_diff_eq!(
            p_success_channels(3, 2).unwrap(),
            0.5 + 0.25 * 8.0 / 15.0,
            epsilon = 1e-15
        );
        // d_out → ∞ limit at fixed s tends to 1/2 + 1/(4s)
        for s in 1..=3usize {
            let p = p_success_channels(4000, s).unwrap();
            let limit = 0.5 + 0.25 / s as f64;
            assert!((p - limit).abs() < 1e-3, "s={s}: {p} vs {limit}");
        }
    }

    #[test]
    fn povm_success_landmarks() {
        assert_abs_diff_eq!(p_success_povm(2, 1).unwrap(), 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(p_success_povm(2, 2).unwrap(), 0.5 + 1.0 / 12.0, epsilon = 1e-15);
        // large d_out tends to 1/2 for every s
        for s in 1..=3usize {
            assert!((p_success_povm(4000, s).unwrap() - 0.5).abs() < 1e-3);
        }
        assert_abs_diff_eq!(p_success_povm(1, 5).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_ensembles_error() {
        assert!(matches!(p_success_channels(1, 1), Err(Error::DegenerateEnsemble)));
    }

    #[test]
    fn trivial_input_values() {
        assert_abs_diff_eq!(p_success_trivial_input(2, 1), 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(p_success_trivial_input(3, 1), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn trivial_input_matches_direct_trace_norm() {
        // d_in = 1: the diamond norm is just ‖J‖₁
        let d = dims(1, 2, 2);
        let j = diff_operator(Kind::Channel, d).unwrap();
        let tn = trace_norm(&j.matrix).unwrap();
        let p = 0.5 + 0.25 * tn;
        assert_abs_diff_eq!(p, p_success_trivial_input(2, 2), epsilon = 1e-10);
    }

    #[test]
    fn averaged_success_probabilities() {
        // Hilbert-Schmidt measure: point mass at s = d_i·d_o
        let p = averaged_p(Kind::Channel, 2, &EnvDistribution::point_mass(4)).unwrap();
        assert_abs_diff_eq!(p, 0.5 + 0.25 * 3.0 / (2.0 * 7.0), epsilon = 1e-15);

        let p = averaged_p(Kind::Povm, 2, &EnvDistribution::point_mass(4)).unwrap();
        assert_abs_diff_eq!(p, 0.5 + 0.5 / (2.0 * 7.0), epsilon = 1e-15);

        // point mass consistency with the fixed-s formulas
        for s in 1..=3usize {
            let pm = EnvDistribution::point_mass(s);
            assert_abs_diff_eq!(
                averaged_p(Kind::Channel, 3, &pm).unwrap(),
                p_success_channels(3, s).unwrap(),
                epsilon = 1e-15
            );
        }

        // nontrivial mixture
        let pi = EnvDistribution::new(vec![(1, 0.5), (2, 0.5)]).unwrap();
        let expected = 0.5 * p_success_channels(2, 1).unwrap()
            + 0.5 * p_success_channels(2, 2).unwrap();
        assert_abs_diff_eq!(averaged_p(Kind::Channel, 2, &pi).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn antisym_state_properties() {
        assert!(antisym_state(1).is_err());
        let rho = antisym_state(2).unwrap();
        assert_abs_diff_eq!(rho.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.matrix()[(1, 2)].re, -0.5, epsilon = 1e-15);
        // purity
        let sq = rho.matrix().mul(rho.matrix());
        assert_abs_diff_eq!(sq.trace().re, 1.0, epsilon = 1e-12);

        for d_in in 2..=4usize {
            let rho = antisym_state(d_in).unwrap();
            let s = swap_operator(d_in);
            let expect = s.matrix().mul(rho.matrix()).trace().re;
            assert_abs_diff_eq!(expect, -1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rho_identical_forms() {
        // channels at ⟨S⟩ = −1, d_o = 2, s = 1: antisymmetric projector (I−S)/2
        let rho = rho_identical(Kind::Channel, dims(2, 2, 1), -1.0).unwrap();
        let expected = ComplexMatrix::identity(4)
            .sub(swap_operator(2).matrix())
            .scale_re(0.5);
        assert!(rho.matrix().max_abs_diff(&expected) <= 1e-12);

        // unit trace for arbitrary swap expectation
        for g in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let rho = rho_identical(Kind::Channel, dims(2, 3, 2), g).unwrap();
            assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
            let rho = rho_identical(Kind::Povm, dims(2, 3, 2), g).unwrap();
            assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        }

        // ⟨S⟩ = −1 reductions
        let rho = rho_identical(Kind::Povm, dims(2, 2, 2), -1.0).unwrap();
        let expected = ComplexMatrix::identity(4)
            .scale_re(2.0)
            .sub(dephased_swap(2).matrix())
            .scale_re(1.0 / 6.0);
        assert!(rho.matrix().max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn averaged_output_states_are_density_matrices() {
        for kind in [Kind::Channel, Kind::Povm] {
            for d_o in 2..=3usize {
                for s in 1..=3usize {
                    let rho = rho_identical(kind, dims(2, d_o, s), -1.0).unwrap();
                    assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
                    let (vals, _) = herm_eig(&rho).unwrap();
                    assert!(vals.into_iter().all(|l| l >= -1e-10));
                }
            }
        }
        let rho = rho_different(2);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert!(rho.matrix().max_abs_diff(&ComplexMatrix::identity(4).scale_re(0.25)) <= 1e-15);
    }

    #[test]
    fn strategy_matches_closed_form() {
        let r = optimal_strategy_success(Kind::Channel, dims(2, 2, 1)).unwrap();
        assert_abs_diff_eq!(r.p_success, 0.875, epsilon = 1e-15);

        let r = optimal_strategy_success(Kind::Povm, dims(2, 2, 1)).unwrap();
        assert_abs_diff_eq!(r.p_success, 0.75, epsilon = 1e-15);

        for kind in [Kind::Channel, Kind::Povm] {
            for d_o in 2..=6usize {
                for s in 1..=4usize {
                    let r = optimal_strategy_success(kind, dims(2, d_o, s)).unwrap();
                    let closed = p_success(kind, d_o, s).unwrap();
                    assert!(
                        (r.p_success - closed).abs() <= 1e-12,
                        "{kind} d_o={d_o} s={s}: {} vs {closed}",
                        r.p_success
                    );
                }
            }
        }
    }

    #[test]
    fn success_probability_monotonicity() {
        // channels: strictly decreasing in s for fixed d_o
        for d_o in 2..=6usize {
            for s in 1..=5usize {
                assert!(
                    p_success_channels(d_o, s).unwrap() > p_success_channels(d_o, s + 1).unwrap()
                );
            }
        }
        // POVMs: maximal at d_o = 2 for every s
        for s in 1..=4usize {
            let best = p_success_povm(2, s).unwrap();
            for d_o in 3..=12usize {
                assert!(p_success_povm(d_o, s).unwrap() < best);
            }
        }
    }

    #[test]
    fn saturation_check_values() {
        let (value, _, residual) = saturation_check(dims(2, 2, 1)).unwrap();
        assert_abs_diff_eq!(value, 1.5, epsilon = 1e-10);
        assert!(residual <= 1e-10);

        let (value, _, residual) = saturation_check(dims(3, 2, 2)).unwrap();
        assert_abs_diff_eq!(value, 0.5, epsilon = 1e-10);
        assert!(residual <= 1e-10);

        let (value, _, residual) = saturation_check(dims(2, 3, 1)).unwrap();
        assert_abs_diff_eq!(value, 8.0 / 6.0, epsilon = 1e-10);
        assert!(residual <= 1e-10);
    }

    #[test]
    fn bound_equals_four_times_advantage() {
        use crate::choi::diamond_bound;
        for d_o in 2..=6usize {
            for s in 1..=4usize {
                let j = diff_operator(Kind::Channel, dims(2, d_o, s)).unwrap();
                let bound = diamond_bound(&j).unwrap();
                let adv = 4.0 * (p_success_channels(d_o, s).unwrap() - 0.5);
                assert!((bound - adv).abs() <= 1e-10, "d_o={d_o} s={s}");
            }
        }
    }
}
