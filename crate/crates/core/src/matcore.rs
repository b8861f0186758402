//! Dense complex linear algebra on small matrices: Kronecker products,
//! partial traces, structured operators (swap, dephased swap) and Hermitian
//! spectral calculus (eigendecomposition, trace/operator norms, absolute value).
//!
//! Everything here is double precision and sized for operators of dimension a
//! few hundred at most; there is no attempt at sparsity.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the dimension produced by `kron` and friends.
pub const MAX_DIM: usize = 4096;

/// Entrywise asymmetry accepted (and symmetrized away) by
/// [`HermitianOperator::new`].
pub const HERM_TOL: f64 = 1e-12;

/// Default relative tolerance for spectral reconstructions.
pub const RECON_TOL: f64 = 1e-10;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, entries: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Square diagonal matrix from real entries.
    pub fn diag_real(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)].conj())
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| a * self[(r, c)])
    }

    pub fn scale_re(&self, a: f64) -> Self {
        self.scale(Complex64::new(a, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + other[(r, c)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        Self::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - other[(r, c)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Deviation from Hermiticity, max over entries of |M - M†|.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(self.is_square(), "hermiticity of a non-square matrix");
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)])
    }

    pub(crate) fn from_dmatrix(m: &DMatrix<Complex64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.cols + c]
    }
}

/// Square matrix certified Hermitian at construction.
///
/// The constructor symmetrizes `(M + M†)/2` when the entrywise asymmetry is
/// below [`HERM_TOL`] and rejects the input otherwise, so downstream spectral
/// routines can rely on real eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERM_TOL {
            return Err(Error::NotHermitian { max_asym: defect });
        }
        let dim = matrix.rows();
        let sym = matrix.add(&matrix.dagger()).scale_re(0.5);
        Ok(Self { dim, matrix: sym })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    if rows > MAX_DIM || cols > MAX_DIM {
        return Err(Error::Dimension(format!(
            "Kronecker product of {}x{} and {}x{} exceeds the dimension cap {}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            MAX_DIM
        )));
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows() {
        for ac in 0..a.cols() {
            let v = a[(ar, ac)];
            if v == Complex64::ZERO {
                continue;
            }
            for br in 0..b.rows() {
                for bc in 0..b.cols() {
                    out[(ar * b.rows() + br, ac * b.cols() + bc)] = v * b[(br, bc)];
                }
            }
        }
    }
    Ok(out)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Partial trace of a square matrix over the listed tensor factors.
///
/// `dims` lists the factor dimensions left to right; their product must equal
/// the matrix dimension. Plain-matrix variant; the Hermitian wrapper is
/// [`partial_trace`].
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    traced: &[usize],
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension("partial trace of a non-square matrix".into()));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::Dimension(format!(
            "factor dimensions {:?} do not multiply to the matrix dimension {}",
            dims,
            m.rows()
        )));
    }
    let mut is_traced = vec![false; dims.len()];
    for &t in traced {
        if t >= dims.len() {
            return Err(Error::Dimension(format!("traced factor index {t} out of range")));
        }
        is_traced[t] = true;
    }

    let kept: Vec<usize> = (0..dims.len()).filter(|&k| !is_traced[k]).collect();
    let traced_list: Vec<usize> = (0..dims.len()).filter(|&k| is_traced[k]).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product::<usize>().max(1);
    let str_full = strides(dims);

    let kept_strides: Vec<usize> = kept.iter().map(|&k| str_full[k]).collect();
    let traced_dims: Vec<usize> = traced_list.iter().map(|&k| dims[k]).collect();
    let traced_strides: Vec<usize> = traced_list.iter().map(|&k| str_full[k]).collect();

    // Enumerate flat offsets contributed by a multi-index over a factor subset.
    let offsets = |sub_dims: &[usize], sub_strides: &[usize]| -> Vec<usize> {
        let count: usize = sub_dims.iter().product::<usize>().max(1);
        let mut out = Vec::with_capacity(count);
        for mut flat in 0..count {
            let mut off = 0;
            for k in (0..sub_dims.len()).rev() {
                off += (flat % sub_dims[k]) * sub_strides[k];
                flat /= sub_dims[k];
            }
            out.push(off);
        }
        out
    };

    let kept_offsets = offsets(&kept_dims, &kept_strides);
    let traced_offsets = offsets(&traced_dims, &traced_strides);

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for (r, &ro) in kept_offsets.iter().enumerate() {
        for (c, &co) in kept_offsets.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for &to in &traced_offsets {
                acc += m[(ro + to, co + to)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Partial trace of a Hermitian operator; preserves the total trace.
pub fn partial_trace(
    m: &HermitianOperator,
    dims: &[usize],
    traced: &[usize],
) -> Result<HermitianOperator> {
    HermitianOperator::new(partial_trace_matrix(m.matrix(), dims, traced)?)
}

/// Reorder tensor factors of a square matrix.
///
/// `new_order[k]` names the old factor placed at position `k` of the result.
pub fn permute_factors(
    m: &ComplexMatrix,
    dims: &[usize],
    new_order: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || total != m.rows() {
        return Err(Error::Dimension("factor dimensions do not match the matrix".into()));
    }
    if new_order.len() != dims.len() {
        return Err(Error::Dimension("permutation length mismatch".into()));
    }
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = new_order.iter().map(|&k| dims[k]).collect();

    // map[i] = old flat index of new flat index i
    let mut map = vec![0usize; total];
    for i in 0..total {
        let mut flat = i;
        let mut old = 0;
        for k in (0..new_dims.len()).rev() {
            old += (flat % new_dims[k]) * old_strides[new_order[k]];
            flat /= new_dims[k];
        }
        map[i] = old;
    }

    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            out[(r, c)] = m[(map[r], map[c])];
        }
    }
    Ok(out)
}

/// Swap operator `S` on `ℂ^a ⊗ ℂ^a`, `S|ij⟩ = |ji⟩`.
pub fn swap_operator(a: usize) -> HermitianOperator {
    assert!(a >= 1, "swap dimension must be positive");
    let mut m = ComplexMatrix::zeros(a * a, a * a);
    for i in 0..a {
        for j in 0..a {
            m[(i * a + j, j * a + i)] = Complex64::ONE;
        }
    }
    HermitianOperator::new(m).expect("swap operator is Hermitian")
}

/// Completely dephasing map: zeroes all off-diagonal entries.
pub fn dephase(m: &HermitianOperator) -> HermitianOperator {
    let d = m.dim();
    let out = ComplexMatrix::from_fn(d, d, |r, c| {
        if r == c {
            m.matrix()[(r, c)]
        } else {
            Complex64::ZERO
        }
    });
    HermitianOperator::new(out).expect("diagonal matrix is Hermitian")
}

/// Dephase only the listed tensor factors: entries survive only where those
/// factors carry equal row and column indices.
pub fn dephase_factors(
    m: &ComplexMatrix,
    dims: &[usize],
    factors: &[usize],
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || total != m.rows() {
        return Err(Error::Dimension("factor dimensions do not match the matrix".into()));
    }
    let str_full = strides(dims);
    let idx_of = |flat: usize, k: usize| (flat / str_full[k]) % dims[k];
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        for c in 0..total {
            if factors.iter().all(|&k| idx_of(r, k) == idx_of(c, k)) {
                out[(r, c)] = m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Dephased swap `T = Δ(S) = Σᵢ |ii⟩⟨ii|` on `ℂ^d ⊗ ℂ^d`.
pub fn dephased_swap(d: usize) -> HermitianOperator {
    dephase(&swap_operator(d))
}

/// Hermitian eigendecomposition; eigenvalues sorted descending, eigenvectors
/// as matching columns. Fails if the reconstruction residual exceeds
/// [`RECON_TOL`] relative to the Frobenius norm.
///
/// Cyclic complex Jacobi iteration: each sweep annihilates every off-diagonal
/// pair with a phased plane rotation. Quadratically convergent and accurate
/// to machine precision at the dense sizes used here, which the downstream
/// 1e-10 residual tolerances require.
pub fn herm_eig(m: &HermitianOperator) -> Result<(Vec<f64>, ComplexMatrix)> {
    let d = m.dim();
    let mut a = m.matrix().clone();
    let mut v = ComplexMatrix::identity(d);
    let scale_fro = a.frobenius_norm().max(1.0);
    let stop = 1e-15 * scale_fro;
    const MAX_SWEEPS: usize = 60;
    for sweep in 0..=MAX_SWEEPS {
        let off: f64 = (0..d)
            .flat_map(|p| (0..d).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= stop {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::Numerical(format!(
                "Jacobi eigensolver did not converge: off-diagonal norm {off:.3e}"
            )));
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= 1e-300 {
                    continue;
                }
                // phase u makes the (p,q) entry real; then a real rotation
                // with the smaller-magnitude tangent root annihilates it
                let u = apq / b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    -1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // R = [[c, -s], [s·u*, c·u*]] acting on columns (p, q)
                let su = s * u.conj();
                let cu = c * u.conj();
                for i in 0..d {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c + aiq * su;
                    a[(i, q)] = -aip * s + aiq * cu;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c + viq * su;
                    v[(i, q)] = -vip * s + viq * cu;
                }
                let su_c = su.conj();
                let cu_c = cu.conj();
                for j in 0..d {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c + aqj * su_c;
                    a[(q, j)] = -apj * s + aqj * cu_c;
                }
                // clean residual imaginary round-off on the diagonal
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.partial_cmp(&a[(x, x)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(d, d, |r, c| v[(r, order[c])]);

    // residual check: ‖m − VΛV†‖_F ≤ tol·‖m‖_F
    let lambda = ComplexMatrix::diag_real(&values);
    let recon = vectors.mul(&lambda).mul(&vectors.dagger());
    let residual = recon.sub(m.matrix()).frobenius_norm();
    let scale = m.matrix().frobenius_norm().max(1.0);
    if residual > RECON_TOL * scale {
        return Err(Error::Numerical(format!(
            "eigendecomposition residual {residual:.3e} exceeds {RECON_TOL:.0e} x {scale:.3e}"
        )));
    }
    Ok((values, vectors))
}

/// Trace norm `Σ|λᵢ|` of a Hermitian operator.
pub fn trace_norm(m: &HermitianOperator) -> Result<f64> {
    Ok(herm_eig(m)?.0.iter().map(|l| l.abs()).sum())
}

/// Operator norm `max|λᵢ|` of a Hermitian operator.
pub fn op_norm(m: &HermitianOperator) -> Result<f64> {
    Ok(herm_eig(m)?.0.iter().fold(0.0f64, |a, l| a.max(l.abs())))
}

/// Absolute value `|m| = V|Λ|V†`; positive semidefinite with the same
/// eigenvectors.
pub fn abs_herm(m: &HermitianOperator) -> Result<HermitianOperator> {
    let (values, vectors) = herm_eig(m)?;
    let abs_vals: Vec<f64> = values.iter().map(|l| l.abs()).collect();
    let lambda = ComplexMatrix::diag_real(&abs_vals);
    HermitianOperator::new(vectors.mul(&lambda).mul(&vectors.dagger()))
}
