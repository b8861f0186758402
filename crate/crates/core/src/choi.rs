//! Choi representations: the generic Choi matrix of a channel action, the
//! averaged closed forms over the Haar-Stinespring ensemble, the difference
//! operator between "same pair" and "independent pair" averages, the polar
//! decomposition check and the diamond-norm bound.
//!
//! Factor ordering is fixed as (out₁, out₂, in₁, in₂); partial traces always
//! address factors by index.

use num_complex::Complex64;
use serde::Serialize;

use crate::ensembles::{ComparisonDims, Isometry};
use crate::error::{Error, Result};
use crate::matcore::{
    abs_herm, dephase_factors, kron, op_norm, partial_trace, permute_factors, swap_operator,
    dephased_swap, ComplexMatrix, HermitianOperator,
};
use crate::Kind;

/// Operator on (output ⊗ input) space with factor-dimension metadata; output
/// factors come first.
#[derive(Clone, Debug, Serialize)]
pub struct ChoiMatrix {
    pub out_dims: Vec<usize>,
    pub in_dims: Vec<usize>,
    #[serde(skip)]
    pub matrix: HermitianOperator,
}

impl ChoiMatrix {
    pub fn new(out_dims: Vec<usize>, in_dims: Vec<usize>, matrix: HermitianOperator) -> Result<Self> {
        let expected: usize =
            out_dims.iter().product::<usize>() * in_dims.iter().product::<usize>();
        if expected != matrix.dim() {
            return Err(Error::Dimension(format!(
                "Choi factors {:?} x {:?} do not match operator dimension {}",
                out_dims,
                in_dims,
                matrix.dim()
            )));
        }
        Ok(Self { out_dims, in_dims, matrix })
    }

    /// All factor dimensions, outputs first.
    pub fn factor_dims(&self) -> Vec<usize> {
        self.out_dims.iter().chain(&self.in_dims).copied().collect()
    }

    fn out_indices(&self) -> Vec<usize> {
        (0..self.out_dims.len()).collect()
    }

    fn in_indices(&self) -> Vec<usize> {
        (self.out_dims.len()..self.out_dims.len() + self.in_dims.len()).collect()
    }

    /// Deviation of `Tr_out(J)` from the identity on the input space
    /// (zero for the Choi of a trace-preserving map).
    pub fn tp_defect(&self) -> Result<f64> {
        let reduced = partial_trace(&self.matrix, &self.factor_dims(), &self.out_indices())?;
        let d: usize = self.in_dims.iter().product();
        Ok(reduced.matrix().max_abs_diff(&ComplexMatrix::identity(d)))
    }

    /// Smallest eigenvalue (≥ −1e-10 for the Choi of a completely positive map).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = crate::matcore::herm_eig(&self.matrix)?;
        Ok(vals.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Choi matrix `J(Ξ) = Σᵢⱼ Ξ(|i⟩⟨j|) ⊗ |i⟩⟨j|` of a linear channel action.
///
/// `out_dims`/`in_dims` carry the tensor-factor metadata of the output and
/// input spaces; their products fix the matrix dimensions the action must
/// respect.
pub fn choi_of_action(
    action: impl Fn(&ComplexMatrix) -> ComplexMatrix,
    out_dims: &[usize],
    in_dims: &[usize],
) -> Result<ChoiMatrix> {
    let d_in: usize = in_dims.iter().product();
    let d_out: usize = out_dims.iter().product();
    let mut j = ComplexMatrix::zeros(d_out * d_in, d_out * d_in);
    for i in 0..d_in {
        for jj in 0..d_in {
            let mut basis = ComplexMatrix::zeros(d_in, d_in);
            basis[(i, jj)] = Complex64::ONE;
            let mapped = action(&basis);
            if mapped.rows() != d_out || mapped.cols() != d_out {
                return Err(Error::Dimension(format!(
                    "channel action returned {}x{}, expected {d_out}x{d_out}",
                    mapped.rows(),
                    mapped.cols()
                )));
            }
            for r in 0..d_out {
                for c in 0..d_out {
                    j[(r * d_in + i, c * d_in + jj)] += mapped[(r, c)];
                }
            }
        }
    }
    ChoiMatrix::new(out_dims.to_vec(), in_dims.to_vec(), HermitianOperator::new(j)?)
}

/// Choi matrix of a single sampled channel `Φ_U^{(s)}`, computed from the
/// rank-one Choi of the isometry channel with the environment traced out.
pub fn choi_of_isometry(u: &Isometry) -> ComplexMatrix {
    let d = u.dims;
    let mut j = ComplexMatrix::zeros(d.d_out * d.d_in, d.d_out * d.d_in);
    for o in 0..d.d_out {
        for i in 0..d.d_in {
            for op in 0..d.d_out {
                for ip in 0..d.d_in {
                    let mut acc = Complex64::ZERO;
                    for e in 0..d.env {
                        acc +=
                            u.matrix[(o * d.env + e, i)] * u.matrix[(op * d.env + e, ip)].conj();
                    }
                    j[(o * d.d_in + i, op * d.d_in + ip)] = acc;
                }
            }
        }
    }
    j
}

/// Choi matrix of the pair channel `Φ_U^{(s)} ⊗ Φ_V^{(s)}` in the
/// (out₁, out₂, in₁, in₂) factor order. For `kind = Povm` the output factors
/// are dephased, per the POVM-as-dephased-channel representation.
pub fn choi_of_pair(kind: Kind, u: &Isometry, v: &Isometry) -> Result<ChoiMatrix> {
    if u.dims != v.dims {
        return Err(Error::Dimension("paired isometries must share dimensions".into()));
    }
    let d = u.dims;
    let j1 = choi_of_isometry(u);
    let j2 = choi_of_isometry(v);
    // kron order is (o1, i1, o2, i2); move to (o1, o2, i1, i2)
    let k = kron(&j1, &j2)?;
    let mut m = permute_factors(&k, &[d.d_out, d.d_in, d.d_out, d.d_in], &[0, 2, 1, 3])?;
    if kind == Kind::Povm {
        m = dephase_factors(&m, &[d.d_out, d.d_out, d.d_in, d.d_in], &[0, 1])?;
    }
    ChoiMatrix::new(
        vec![d.d_out, d.d_out],
        vec![d.d_in, d.d_in],
        HermitianOperator::new(m)?,
    )
}

fn ensemble_guard(dims: ComparisonDims) -> Result<()> {
    if dims.d_out * dims.env == 1 {
        return Err(Error::DegenerateEnsemble);
    }
    Ok(())
}

/// The four Kronecker-structured terms common to both averaged Choi closed
/// forms: (I⊗I, S_o⊗S_i or T_o⊗S_i, I⊗S_i, S_o⊗I or T_o⊗I).
fn structured_terms(kind: Kind, dims: ComparisonDims) -> Result<[ComplexMatrix; 4]> {
    let d_o = dims.d_out;
    let d_i = dims.d_in;
    let i_o = ComplexMatrix::identity(d_o * d_o);
    let i_i = ComplexMatrix::identity(d_i * d_i);
    let s_i = swap_operator(d_i);
    let out_swap = match kind {
        Kind::Channel => swap_operator(d_o),
        Kind::Povm => dephased_swap(d_o),
    };
    Ok([
        kron(&i_o, &i_i)?,
        kron(out_swap.matrix(), s_i.matrix())?,
        kron(&i_o, s_i.matrix())?,
        kron(out_swap.matrix(), &i_i)?,
    ])
}

/// Ensemble-averaged Choi matrix of `Φ_U^{(s)} ⊗ Φ_U^{(s)}` (same isometry on
/// both boxes).
pub fn avg_choi_channels_same(dims: ComparisonDims) -> Result<ChoiMatrix> {
    ensemble_guard(dims)?;
    let s = dims.env as f64;
    let x = (dims.d_out * dims.env) as f64;
    let [ii, ss, is, si] = structured_terms(Kind::Channel, dims)?;
    let a = 1.0 / (x * x - 1.0);
    let b = 1.0 / (x * (x * x - 1.0));
    let m = ii
        .scale_re(a * s * s)
        .add(&ss.scale_re(a * s))
        .sub(&is.scale_re(b * s * s))
        .sub(&si.scale_re(b * s));
    ChoiMatrix::new(
        vec![dims.d_out, dims.d_out],
        vec![dims.d_in, dims.d_in],
        HermitianOperator::new(m)?,
    )
}

/// Ensemble-averaged Choi matrix of `P_U^{(s)} ⊗ P_U^{(s)}` for POVM channels;
/// equals the channel closed form with both output factors dephased.
pub fn avg_choi_povm_same(dims: ComparisonDims) -> Result<ChoiMatrix> {
    ensemble_guard(dims)?;
    let s = dims.env as f64;
    let x = (dims.d_out * dims.env) as f64;
    let [ii, ts, is, ti] = structured_terms(Kind::Povm, dims)?;
    let pre = s / (x * x - 1.0);
    let m = ii
        .scale_re(pre * s)
        .add(&ts.scale_re(pre))
        .sub(&is.scale_re(pre * s / x))
        .sub(&ti.scale_re(pre / x));
    ChoiMatrix::new(
        vec![dims.d_out, dims.d_out],
        vec![dims.d_in, dims.d_in],
        HermitianOperator::new(m)?,
    )
}

/// Ensemble-averaged Choi matrix of an independent pair: `(1/d_o²)·I`, for
/// both kinds.
pub fn avg_choi_diff(d_in: usize, d_out: usize) -> Result<ChoiMatrix> {
    let dim = d_out * d_out * d_in * d_in;
    let m = ComplexMatrix::identity(dim).scale_re(1.0 / (d_out * d_out) as f64);
    ChoiMatrix::new(
        vec![d_out, d_out],
        vec![d_in, d_in],
        HermitianOperator::new(m)?,
    )
}

/// The traceless difference operator `J` (channels) or `J_P` (POVMs) between
/// the averaged same-pair and independent-pair Choi matrices.
pub fn diff_operator(kind: Kind, dims: ComparisonDims) -> Result<ChoiMatrix> {
    let same = match kind {
        Kind::Channel => avg_choi_channels_same(dims)?,
        Kind::Povm => avg_choi_povm_same(dims)?,
    };
    let diff = avg_choi_diff(dims.d_in, dims.d_out)?;
    let m = same.matrix.matrix().sub(diff.matrix.matrix());
    ChoiMatrix::new(same.out_dims, same.in_dims, HermitianOperator::new(m)?)
}

/// Residual of the polar-decomposition identity `W J = |J|` with
/// `W = S_{d_o} ⊗ S_{d_i}`: the larger of `‖J² − (WJ)²‖_F` and
/// `‖WJ − |J|‖_F`.
pub fn verify_polar(dims: ComparisonDims) -> Result<f64> {
    let j = diff_operator(Kind::Channel, dims)?;
    let w = kron(swap_operator(dims.d_out).matrix(), swap_operator(dims.d_in).matrix())?;
    let jm = j.matrix.matrix();
    let wj = w.mul(jm);
    let r1 = jm.mul(jm).sub(&wj.mul(&wj)).frobenius_norm();
    let r2 = wj.sub(abs_herm(&j.matrix)?.matrix()).frobenius_norm();
    Ok(r1.max(r2))
}

/// Closed form for `Tr_out |J|` on `ℂ^{d_i} ⊗ ℂ^{d_i}`.
pub fn partial_abs_closed_form(kind: Kind, dims: ComparisonDims) -> Result<HermitianOperator> {
    ensemble_guard(dims)?;
    let d_o = dims.d_out as f64;
    let s = dims.env as f64;
    let coeff = match kind {
        Kind::Channel => (d_o * d_o - 1.0) / (d_o * (s * s * d_o * d_o - 1.0)),
        Kind::Povm => 2.0 * (d_o - 1.0) / (d_o * (s * s * d_o * d_o - 1.0)),
    };
    let d_i = dims.d_in;
    let m = ComplexMatrix::identity(d_i * d_i)
        .scale_re(s * d_o)
        .sub(swap_operator(d_i).matrix())
        .scale_re(coeff);
    HermitianOperator::new(m)
}

/// Diamond-norm upper bound: operator norm of the partial trace, over the
/// output factors, of `|J|`.
pub fn diamond_bound(j: &ChoiMatrix) -> Result<f64> {
    let abs = abs_herm(&j.matrix)?;
    let reduced = partial_trace(&abs, &j.factor_dims(), &j.out_indices())?;
    op_norm(&reduced)
}

/// Numerical route for `Tr_out |J|`; the independent cross-check of
/// [`partial_abs_closed_form`].
pub fn partial_abs_numeric(j: &ChoiMatrix) -> Result<HermitianOperator> {
    let abs = abs_herm(&j.matrix)?;
    partial_trace(&abs, &j.factor_dims(), &j.out_indices())
}

/// Partial trace over the input factors of `J`, used by the saturation check.
pub fn trace_out_inputs(j: &ChoiMatrix, m: &ComplexMatrix) -> Result<HermitianOperator> {
    let reduced = crate::matcore::partial_trace_matrix(m, &j.factor_dims(), &j.in_indices())?;
    HermitianOperator::new(reduced)
}
