//! Haar-Stinespring ensembles: Haar unitaries (Ginibre + QR with the phase
//! fix), Haar isometries as truncated unitaries, and the induced random
//! channels and POVMs.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{partial_trace_matrix, ComplexMatrix, HermitianOperator};

/// Name of the deterministic generator recorded in Monte Carlo reports.
pub const GENERATOR_ID: &str = "chacha12";

/// Dimension triple (d_in, d_out, env) defining the isometry ensemble.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonDims {
    pub d_in: usize,
    pub d_out: usize,
    pub env: usize,
}

impl ComparisonDims {
    /// Requires `env * d_out >= d_in` so the sampled channels are trace
    /// preserving.
    pub fn new(d_in: usize, d_out: usize, env: usize) -> Result<Self> {
        if d_in == 0 || d_out == 0 || env == 0 {
            return Err(Error::Dimension("all dimensions must be positive".into()));
        }
        if env * d_out < d_in {
            return Err(Error::Precondition(format!(
                "trace preservation needs env * d_out >= d_in, got {env} * {d_out} < {d_in}"
            )));
        }
        Ok(Self { d_in, d_out, env })
    }

    /// The dilated dimension `d_out * env`.
    pub fn dilated(&self) -> usize {
        self.d_out * self.env
    }
}

/// Seed for the deterministic sample stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

/// Deterministic sub-stream derived from a seed. Identical `(seed, index)`
/// pairs yield bitwise-identical sample streams.
pub fn stream(seed: RngSeed, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed.0);
    rng.set_stream(index);
    rng
}

/// An isometry `U: ℂ^{d_in} → ℂ^{d_out} ⊗ ℂ^{env}`, stored as a
/// `(d_out·env) × d_in` matrix with orthonormal columns.
#[derive(Clone, Debug)]
pub struct Isometry {
    pub dims: ComparisonDims,
    pub matrix: ComplexMatrix,
}

impl Isometry {
    /// Deviation of `U†U` from the identity on the input space.
    pub fn isometry_defect(&self) -> f64 {
        let gram = self.matrix.dagger().mul(&self.matrix);
        gram.max_abs_diff(&ComplexMatrix::identity(self.dims.d_in))
    }
}

fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random `d × d` unitary.
///
/// Ginibre matrix followed by QR; the Q factor is rephased so that the
/// diagonal of R is positive real, which makes the factorization unique and
/// the resulting distribution exactly Haar.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(d >= 1, "unitary dimension must be positive");
    let g = ginibre(d, d, rng);
    let qr = g.to_dmatrix().qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { Complex64::ONE };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(&q)
}

/// Haar-random isometry: the first `d_in` columns of a Haar unitary on the
/// dilated space.
pub fn haar_isometry(dims: ComparisonDims, rng: &mut impl Rng) -> Isometry {
    let full = haar_unitary(dims.dilated(), rng);
    let matrix = ComplexMatrix::from_fn(dims.dilated(), dims.d_in, |r, c| full[(r, c)]);
    Isometry { dims, matrix }
}

fn check_state(rho: &HermitianOperator, d_in: usize) -> Result<()> {
    if rho.dim() != d_in {
        return Err(Error::Dimension(format!(
            "input state has dimension {}, channel expects {d_in}",
            rho.dim()
        )));
    }
    if (rho.trace() - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!("input state trace {} is not 1", rho.trace())));
    }
    let (vals, _) = crate::matcore::herm_eig(rho)?;
    if vals.iter().any(|&l| l < -1e-10) {
        return Err(Error::Precondition("input state is not positive semidefinite".into()));
    }
    Ok(())
}

/// Stinespring channel application `Φ_U^{(s)}(ρ) = Tr_env(UρU†)`.
pub fn apply_channel(u: &Isometry, rho: &HermitianOperator) -> Result<HermitianOperator> {
    check_state(rho, u.dims.d_in)?;
    let dilated = u.matrix.mul(rho.matrix()).mul(&u.matrix.dagger());
    let reduced = partial_trace_matrix(&dilated, &[u.dims.d_out, u.dims.env], &[1])?;
    HermitianOperator::new(reduced)
}

/// Product-channel application `(Φ_U ⊗ Φ_V)(ρ)` on a bipartite input state of
/// dimension `d_in²`, tracing out both environments.
pub fn apply_channel_pair(
    u: &Isometry,
    v: &Isometry,
    rho: &HermitianOperator,
) -> Result<HermitianOperator> {
    if u.dims != v.dims {
        return Err(Error::Dimension("paired isometries must share dimensions".into()));
    }
    let d = u.dims;
    if rho.dim() != d.d_in * d.d_in {
        return Err(Error::Dimension(format!(
            "pair input state has dimension {}, expected {}",
            rho.dim(),
            d.d_in * d.d_in
        )));
    }
    let b = crate::matcore::kron(&u.matrix, &v.matrix)?;
    let dilated = b.mul(rho.matrix()).mul(&b.dagger());
    // factors after U⊗V: (out1, env1, out2, env2)
    let reduced = partial_trace_matrix(&dilated, &[d.d_out, d.env, d.d_out, d.env], &[1, 3])?;
    HermitianOperator::new(reduced)
}

/// POVM effects `Mᵢ = U†(|i⟩⟨i| ⊗ I_env)U`, one per outcome `i < d_out`.
pub fn povm_effects(u: &Isometry) -> Vec<HermitianOperator> {
    let d = u.dims;
    (0..d.d_out)
        .map(|i| {
            // rows of U belonging to output index i: block i*env..(i+1)*env
            let mut m = ComplexMatrix::zeros(d.d_in, d.d_in);
            for e in 0..d.env {
                let row = i * d.env + e;
                for a in 0..d.d_in {
                    for b in 0..d.d_in {
                        m[(a, b)] += u.matrix[(row, a)].conj() * u.matrix[(row, b)];
                    }
                }
            }
            HermitianOperator::new(m).expect("U† P U is Hermitian")
        })
        .collect()
}

/// POVM channel application: dephased channel output, whose diagonal holds
/// the outcome probabilities `Tr(Mᵢρ)`.
pub fn apply_povm_channel(u: &Isometry, rho: &HermitianOperator) -> Result<HermitianOperator> {
    Ok(crate::matcore::dephase(&apply_channel(u, rho)?))
}
