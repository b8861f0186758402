//! Independent sampling oracle: empirical averaged Choi matrices, empirical
//! success probabilities of the optimal strategy, and empirical asymmetric
//! error pairs, each reported with sample standard errors and z-scores
//! against the closed forms.
//!
//! Reports are bit-reproducible: a fixed generator (`chacha12`), a fixed
//! seed-to-stream mapping, and fixed-order summation.

use serde::Serialize;

use crate::asymmetric::{coefficients, lp_solve};
use crate::choi::{avg_choi_channels_same, avg_choi_diff, avg_choi_povm_same, choi_of_pair};
use crate::ensembles::{
    apply_channel_pair, haar_isometry, stream, ComparisonDims, RngSeed, GENERATOR_ID,
};
use crate::error::{Error, Result};
use crate::matcore::{dephase, dephased_swap, swap_operator, ComplexMatrix};
use crate::symmetric::{antisym_state, p_success};
use crate::Kind;

/// Whether the two boxes hold the same sampled operation or independent ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Same,
    Different,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "same" => Ok(Mode::Same),
            "different" => Ok(Mode::Different),
            other => Err(format!("unknown mode '{other}' (expected 'same' or 'different')")),
        }
    }
}

/// One scalar quantity of a report: the sample mean, its standard error, the
/// closed-form reference and the resulting z-score.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScalarPart {
    pub estimate: f64,
    pub stderr: f64,
    pub analytic: f64,
    pub z: f64,
}

/// Estimate payload of a report.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum McEstimate {
    Scalar(ScalarPart),
    /// Type-I and type-II error estimates from [`estimate_error_pair`].
    Pair { p1: ScalarPart, p2: ScalarPart },
    /// Entrywise matrix mean; `entries` holds `(re, im)` pairs row by row.
    Matrix {
        dim: usize,
        entries: Vec<Vec<(f64, f64)>>,
        stderr_max: f64,
        max_abs_deviation: f64,
    },
}

/// A reproducible Monte Carlo report: same `(seed, n_samples, quantity)`
/// always yields bit-identical estimates.
#[derive(Clone, Debug, Serialize)]
pub struct McReport {
    pub quantity: String,
    pub n_samples: usize,
    pub seed: RngSeed,
    pub generator_id: String,
    pub estimate: McEstimate,
    /// Max entrywise |estimate − analytic| / stderr.
    pub z_max: f64,
}

/// Running mean/variance accumulator with fixed-order summation.
#[derive(Clone, Copy, Default)]
struct Acc {
    n: usize,
    sum: f64,
    sumsq: f64,
}

impl Acc {
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sumsq += x * x;
    }

    fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    /// Standard error of the mean from the unbiased sample variance.
    fn stderr(&self) -> f64 {
        let n = self.n as f64;
        let var = ((self.sumsq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

/// z-score with a guard for (near-)deterministic estimators: zero spread is
/// fine as long as the estimate already sits on the reference.
fn z_score(diff: f64, stderr: f64) -> f64 {
    if stderr > 1e-12 {
        diff.abs() / stderr
    } else if diff.abs() <= 1e-9 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn scalar_part(acc: &Acc, analytic: f64) -> ScalarPart {
    let estimate = acc.mean();
    let stderr = acc.stderr();
    ScalarPart { estimate, stderr, analytic, z: z_score(estimate - analytic, stderr) }
}

fn check_n(n: usize) -> Result<()> {
    if n < 1000 {
        return Err(Error::Precondition(format!("sample count {n} below minimum 1000")));
    }
    Ok(())
}

/// Empirical mean of the pair Choi matrix `J(Φ_U ⊗ Φ_V)` over `n` draws
/// (V = U for `Mode::Same`), compared entrywise against the closed form.
pub fn estimate_avg_choi(
    kind: Kind,
    mode: Mode,
    dims: ComparisonDims,
    n: usize,
    seed: RngSeed,
) -> Result<McReport> {
    check_n(n)?;
    let analytic = match mode {
        Mode::Same => match kind {
            Kind::Channel => avg_choi_channels_same(dims)?,
            Kind::Povm => avg_choi_povm_same(dims)?,
        },
        Mode::Different => avg_choi_diff(dims.d_in, dims.d_out)?,
    };
    let dim = analytic.matrix.dim();
    let mut re = vec![Acc::default(); dim * dim];
    let mut im = vec![Acc::default(); dim * dim];
    let mut rng = stream(seed, 0);
    for _ in 0..n {
        let u = haar_isometry(dims, &mut rng);
        let j = match mode {
            Mode::Same => choi_of_pair(kind, &u, &u)?,
            Mode::Different => {
                let v = haar_isometry(dims, &mut rng);
                choi_of_pair(kind, &u, &v)?
            }
        };
        let m = j.matrix.matrix();
        for r in 0..dim {
            for c in 0..dim {
                re[r * dim + c].push(m[(r, c)].re);
                im[r * dim + c].push(m[(r, c)].im);
            }
        }
    }
    let target = analytic.matrix.matrix();
    let mut entries = vec![vec![(0.0, 0.0); dim]; dim];
    let mut z_max: f64 = 0.0;
    let mut stderr_max: f64 = 0.0;
    let mut max_dev: f64 = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            let (ar, ai) = (re[r * dim + c], im[r * dim + c]);
            entries[r][c] = (ar.mean(), ai.mean());
            for (acc, reference) in [(ar, target[(r, c)].re), (ai, target[(r, c)].im)] {
                let stderr = acc.stderr();
                let dev = (acc.mean() - reference).abs();
                z_max = z_max.max(z_score(acc.mean() - reference, stderr));
                stderr_max = stderr_max.max(stderr);
                max_dev = max_dev.max(dev);
            }
        }
    }
    Ok(McReport {
        quantity: format!("avg_choi/{kind}/{mode:?}", mode = mode).to_lowercase(),
        n_samples: n,
        seed,
        generator_id: GENERATOR_ID.into(),
        estimate: McEstimate::Matrix { dim, entries, stderr_max, max_abs_deviation: max_dev },
        z_max,
    })
}

/// Per-trial output state of the optimal protocol: the pair channel applied
/// to the antisymmetric two-copy input, dephased for the POVM kind.
fn protocol_output(
    kind: Kind,
    u: &crate::ensembles::Isometry,
    v: &crate::ensembles::Isometry,
    input: &crate::matcore::HermitianOperator,
) -> Result<ComplexMatrix> {
    let out = apply_channel_pair(u, v, input)?;
    Ok(match kind {
        Kind::Channel => out.matrix().clone(),
        Kind::Povm => dephase(&out).matrix().clone(),
    })
}

/// Empirical success probability of the optimal strategy: a fair coin picks
/// the same/different hypothesis, the sampled pair acts on the antisymmetric
/// input, and the per-trial success is the exact acceptance probability of
/// the correct answer under the optimal accept effect.
pub fn estimate_success(
    kind: Kind,
    dims: ComparisonDims,
    n: usize,
    seed: RngSeed,
) -> Result<McReport> {
    check_n(n)?;
    if dims.d_in < 2 {
        return Err(Error::Precondition("strategy estimation needs d_in >= 2".into()));
    }
    let analytic = p_success(kind, dims.d_out, dims.env)?;
    let input = antisym_state(dims.d_in)?;
    let omega = crate::symmetric::accept_effect(kind, dims.d_out);
    let mut acc = Acc::default();
    let mut rng = stream(seed, 0);
    for _ in 0..n {
        let same: bool = rand::Rng::gen_bool(&mut rng, 0.5);
        let u = haar_isometry(dims, &mut rng);
        let rho = if same {
            protocol_output(kind, &u, &u, &input)?
        } else {
            let v = haar_isometry(dims, &mut rng);
            protocol_output(kind, &u, &v, &input)?
        };
        let p_same = omega.mul(&rho).trace().re.clamp(0.0, 1.0);
        acc.push(if same { p_same } else { 1.0 - p_same });
    }
    let part = scalar_part(&acc, analytic);
    Ok(McReport {
        quantity: format!("success/{kind}"),
        n_samples: n,
        seed,
        generator_id: GENERATOR_ID.into(),
        z_max: part.z,
        estimate: McEstimate::Scalar(part),
    })
}

/// Empirical type-I/type-II error pair of the LP-optimal effect at type-I
/// budget ε: `p_I` is sampled under the same hypothesis (sub-stream 0) and
/// `p_II` under the different hypothesis (sub-stream 1).
pub fn estimate_error_pair(
    kind: Kind,
    dims: ComparisonDims,
    epsilon: f64,
    n: usize,
    seed: RngSeed,
) -> Result<McReport> {
    check_n(n)?;
    if dims.d_in < 2 {
        return Err(Error::Precondition("error-pair estimation needs d_in >= 2".into()));
    }
    let c = coefficients(kind, dims.d_out, dims.env)?;
    let point = lp_solve(&c, epsilon)?;
    let p1_analytic = 1.0 - (c.alpha * point.t_a + c.beta * point.t_s);
    let dim = dims.d_out * dims.d_out;
    let (pi_a, pi_s) = match kind {
        Kind::Channel => {
            let s = swap_operator(dims.d_out);
            (
                ComplexMatrix::identity(dim).sub(s.matrix()).scale_re(0.5),
                ComplexMatrix::identity(dim).add(s.matrix()).scale_re(0.5),
            )
        }
        Kind::Povm => {
            let t = dephased_swap(dims.d_out);
            (ComplexMatrix::identity(dim).sub(t.matrix()), t.matrix().clone())
        }
    };
    // "answer same" effect: p_I = 1 − Tr(Ω ρ_same), p_II = Tr(Ω ρ_diff)
    let omega = pi_a.scale_re(point.t_a).add(&pi_s.scale_re(point.t_s));
    let input = antisym_state(dims.d_in)?;
    let mut acc1 = Acc::default();
    let mut acc2 = Acc::default();
    let mut rng_same = stream(seed, 0);
    let mut rng_diff = stream(seed, 1);
    for _ in 0..n {
        let u = haar_isometry(dims, &mut rng_same);
        let rho = protocol_output(kind, &u, &u, &input)?;
        acc1.push(1.0 - omega.mul(&rho).trace().re.clamp(0.0, 1.0));

        let u = haar_isometry(dims, &mut rng_diff);
        let v = haar_isometry(dims, &mut rng_diff);
        let rho = protocol_output(kind, &u, &v, &input)?;
        acc2.push(omega.mul(&rho).trace().re.clamp(0.0, 1.0));
    }
    let p1 = scalar_part(&acc1, p1_analytic);
    let p2 = scalar_part(&acc2, point.p2_star);
    Ok(McReport {
        quantity: format!("error_pair/{kind}"),
        n_samples: n,
        seed,
        generator_id: GENERATOR_ID.into(),
        z_max: p1.z.max(p2.z),
        estimate: McEstimate::Pair { p1, p2 },
    })
}

/// The scalar estimate of a report, if it has one.
pub fn scalar_estimate(report: &McReport) -> Option<f64> {
    match &report.estimate {
        McEstimate::Scalar(p) => Some(p.estimate),
        _ => None,
    }
}
