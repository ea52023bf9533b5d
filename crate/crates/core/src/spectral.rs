//! Dense Hermitian linear algebra: a cyclic complex Jacobi eigensolver,
//! spectral operator functions and the truncated Moore–Penrose inverse.
//!
//! Every inverse in the crate goes through [`RankTolerance`]: eigenvalues at
//! or below `relative_cutoff * max|λ|` are treated as zero. At finite
//! truncation this cutoff is what stands in for an unbounded inverse, so
//! callers that care report the retained rank alongside their results.

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type HVector = DVector<C64>;

const MAX_SWEEPS: usize = 100;
const CONVERGENCE: f64 = 1e-14;

/// Relative eigenvalue cutoff used by every pseudo-inverse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankTolerance {
    relative_cutoff: f64,
}

impl RankTolerance {
    pub const DEFAULT_CUTOFF: f64 = 1e-12;
    pub const DEFAULT: Self = Self { relative_cutoff: Self::DEFAULT_CUTOFF };

    pub fn new(relative_cutoff: f64) -> Result<Self> {
        if !(relative_cutoff.is_finite() && relative_cutoff > 0.0) {
            return Err(FrameError::InvalidInput(format!(
                "rank cutoff must be positive and finite, got {relative_cutoff}"
            )));
        }
        Ok(Self { relative_cutoff })
    }

    pub fn relative_cutoff(&self) -> f64 {
        self.relative_cutoff
    }

    /// Absolute cutoff for a spectrum whose largest magnitude is `scale`.
    pub fn cutoff(&self, scale: f64) -> f64 {
        self.relative_cutoff * scale
    }
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: CMatrix,
}

impl HermitianMatrix {
    /// Symmetrizes `m` as `(m + m*) / 2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(FrameError::InvalidInput(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(FrameError::InvalidInput("empty matrix".into()));
        }
        ensure_finite(&m)?;
        let sym = (&m + m.adjoint()).unscale(2.0);
        Ok(Self { inner: sym })
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: CMatrix::identity(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0)));
        Self::new(CMatrix::from_diagonal(&v))
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    pub fn eig(&self) -> Result<EigenDecomposition> {
        eig(self)
    }

    /// Hermitian quadratic form `<f, A f>`.
    pub fn quadratic_form(&self, f: &HVector) -> Result<f64> {
        if f.len() != self.dim() {
            return Err(FrameError::dims(self.dim(), f.len()));
        }
        Ok(f.dotc(&(&self.inner * f)).re)
    }
}

/// Eigenvalues sorted descending with the matching unitary eigenvector matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, each scaled so its largest-magnitude entry is real positive.
    pub eigenvectors: CMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, l| acc.max(l.abs()))
    }

    pub fn largest(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn cutoff(&self, tol: RankTolerance) -> f64 {
        tol.cutoff(self.max_abs_eigenvalue())
    }

    fn is_retained(&self, lambda: f64, cutoff: f64) -> bool {
        lambda.abs() > cutoff
    }

    /// Number of eigenvalues above the cutoff.
    pub fn rank(&self, tol: RankTolerance) -> usize {
        let c = self.cutoff(tol);
        self.eigenvalues.iter().filter(|l| self.is_retained(**l, c)).count()
    }

    /// `U Λ U*`.
    pub fn recompose(&self) -> CMatrix {
        self.weighted_outer(&self.eigenvalues)
    }

    /// Orthogonal projector onto the span of retained eigenvectors.
    pub fn range_projector(&self, tol: RankTolerance) -> CMatrix {
        let c = self.cutoff(tol);
        let w: Vec<f64> = self
            .eigenvalues
            .iter()
            .map(|&l| if self.is_retained(l, c) { 1.0 } else { 0.0 })
            .collect();
        self.weighted_outer(&w)
    }

    /// `U f(Λ) U*`, see [`apply_function`].
    pub fn map(&self, f: SpectralFunction<'_>, tol: RankTolerance) -> Result<HermitianMatrix> {
        let c = self.cutoff(tol);
        let mut w = Vec::with_capacity(self.dim());
        for &lambda in &self.eigenvalues {
            let retained = self.is_retained(lambda, c);
            w.push(f.eval(lambda, retained)?);
        }
        let m = self.weighted_outer(&w);
        HermitianMatrix::new(m)
    }

    fn weighted_outer(&self, w: &[f64]) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &wj) in w.iter().enumerate() {
            scaled.column_mut(j).scale_mut(wj);
        }
        scaled * u.adjoint()
    }
}

/// Scalar functions applied through the spectrum.
///
/// Inverse-type functions send eigenvalues at or below the cutoff to zero;
/// all others see the raw eigenvalue.
#[derive(Clone, Copy)]
pub enum SpectralFunction<'a> {
    Identity,
    Sqrt,
    Inverse,
    InverseSqrt,
    Custom { f: &'a dyn Fn(f64) -> f64, inverse_type: bool },
}

impl SpectralFunction<'_> {
    pub fn is_inverse_type(&self) -> bool {
        match self {
            SpectralFunction::Inverse | SpectralFunction::InverseSqrt => true,
            SpectralFunction::Custom { inverse_type, .. } => *inverse_type,
            _ => false,
        }
    }

    fn eval(&self, lambda: f64, retained: bool) -> Result<f64> {
        if !retained && self.is_inverse_type() {
            return Ok(0.0);
        }
        let value = match self {
            SpectralFunction::Identity => lambda,
            SpectralFunction::Sqrt => {
                if retained && lambda < 0.0 {
                    return Err(FrameError::SingularOperator(format!(
                        "square root of negative eigenvalue {lambda:e}"
                    )));
                }
                lambda.max(0.0).sqrt()
            }
            SpectralFunction::Inverse => 1.0 / lambda,
            SpectralFunction::InverseSqrt => {
                if lambda < 0.0 {
                    return Err(FrameError::SingularOperator(format!(
                        "inverse square root of negative eigenvalue {lambda:e}"
                    )));
                }
                1.0 / lambda.sqrt()
            }
            SpectralFunction::Custom { f, .. } => f(lambda),
        };
        if value.is_finite() {
            Ok(value)
        } else if retained {
            Err(FrameError::SingularOperator(format!(
                "function undefined at retained eigenvalue {lambda:e}"
            )))
        } else {
            // non-inverse function blowing up on a numerically zero eigenvalue
            Err(FrameError::SingularOperator(format!(
                "function undefined at eigenvalue {lambda:e} below cutoff"
            )))
        }
    }
}

/// Eigendecomposition by cyclic complex Jacobi rotations.
///
/// Stops once the off-diagonal Frobenius norm is at most `1e-14 ‖A‖_F`.
/// Eigenvalues are sorted descending; within numerical ties eigenvectors are
/// ordered by the index of their largest-magnitude component.
pub fn eig(a: &HermitianMatrix) -> Result<EigenDecomposition> {
    let n = a.dim();
    let mut m: Vec<C64> = a.as_matrix().as_slice().to_vec();
    let mut v: Vec<C64> = CMatrix::identity(n, n).as_slice().to_vec();

    let frob = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = CONVERGENCE * frob;

    let mut off = off_diagonal_norm(&m, n);
    let mut sweeps = 0;
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(FrameError::NotConverged { sweeps, off_norm: off });
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, n, p, q, sweeps);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&m, n);
    }

    let raw: Vec<f64> = (0..n).map(|i| m[i + i * n].re).collect();
    Ok(sort_decomposition(raw, CMatrix::from_vec(n, n, v)))
}

fn off_diagonal_norm(m: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += m[i + j * n].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating entry (p, q). Column-major storage.
fn rotate(m: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize, sweep: usize) {
    let apq = m[p + q * n];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = m[p + p * n].re;
    let aqq = m[q + q * n].re;
    // after a few sweeps, entries negligible next to both diagonals are dropped
    if sweep > 3 && app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs() {
        m[p + q * n] = C64::new(0.0, 0.0);
        m[q + p * n] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.is_finite() {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    } else {
        0.0
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let e_minus = phase.conj();

    // U = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane; A <- U* A U, V <- V U.
    let u_qp = -e_minus * s;
    let u_qq = e_minus * c;
    for k in 0..n {
        let x = m[k + p * n];
        let y = m[k + q * n];
        m[k + p * n] = x * c + y * u_qp;
        m[k + q * n] = x * s + y * u_qq;
    }
    for k in 0..n {
        let x = m[p + k * n];
        let y = m[q + k * n];
        m[p + k * n] = x * c + y * u_qp.conj();
        m[q + k * n] = x * s + y * u_qq.conj();
    }
    m[p + p * n] = C64::new(app - t * g, 0.0);
    m[q + q * n] = C64::new(aqq + t * g, 0.0);
    m[p + q * n] = C64::new(0.0, 0.0);
    m[q + p * n] = C64::new(0.0, 0.0);
    for k in 0..n {
        let x = v[k + p * n];
        let y = v[k + q * n];
        v[k + p * n] = x * c + y * u_qp;
        v[k + q * n] = x * s + y * u_qq;
    }
}

fn dominant_index(col: &[C64]) -> usize {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in col.iter().enumerate() {
        let mag = z.norm_sqr();
        if mag > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = mag;
        }
    }
    best
}

fn sort_decomposition(values: Vec<f64>, vectors: CMatrix) -> EigenDecomposition {
    let n = values.len();
    let scale = values.iter().fold(0.0_f64, |acc, l| acc.max(l.abs()));
    let tie = 1e-12 * scale;
    let dominant: Vec<usize> =
        (0..n).map(|j| dominant_index(vectors.column(j).as_slice())).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    // within runs of tied eigenvalues, order by dominant component index
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[order[start]] - values[order[end]]).abs() <= tie {
            end += 1;
        }
        order[start..end].sort_by_key(|&k| (dominant[k], k));
        start = end;
    }

    let mut eigenvectors = CMatrix::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(values[src]);
        let col = vectors.column(src);
        let pivot = col[dominant[src]];
        let unit = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
        eigenvectors.set_column(dst, &(col * unit));
    }
    EigenDecomposition { eigenvalues, eigenvectors }
}

/// `U f(Λ) U*` with the rank cutoff semantics of [`SpectralFunction`].
pub fn apply_function(
    a: &HermitianMatrix,
    f: SpectralFunction<'_>,
    tol: RankTolerance,
) -> Result<HermitianMatrix> {
    eig(a)?.map(f, tol)
}

/// Truncated Moore–Penrose pseudo-inverse of an arbitrary `d x N` matrix.
///
/// Goes through the eigendecomposition of whichever of `M*M` and `MM*` is
/// smaller, so the cutoff acts on squared singular values.
pub fn pseudo_inverse(m: &CMatrix, tol: RankTolerance) -> Result<CMatrix> {
    ensure_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(CMatrix::zeros(cols, rows));
    }
    let adj = m.adjoint();
    if cols <= rows {
        let gram = HermitianMatrix::new(&adj * m)?;
        let inv = eig(&gram)?.map(SpectralFunction::Inverse, tol)?;
        Ok(inv.as_matrix() * adj)
    } else {
        let gram = HermitianMatrix::new(m * &adj)?;
        let inv = eig(&gram)?.map(SpectralFunction::Inverse, tol)?;
        Ok(adj * inv.as_matrix())
    }
}

/// Largest entry modulus.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(FrameError::InvalidInput("matrix has non-finite entries".into()))
    }
}

/// Embeds a real vector.
pub fn real_vector(values: &[f64]) -> HVector {
    HVector::from_iterator(values.len(), values.iter().map(|&x| C64::new(x, 0.0)))
}
