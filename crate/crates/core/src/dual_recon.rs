//! Canonical duals, the coefficient-space projection, Gram-side operators,
//! reproducing kernels, triplet norms and every reconstruction formula.
//!
//! All inverses are truncated spectral pseudo-inverses sharing one
//! [`RankTolerance`]. Reports carry the retained rank so cutoff activity,
//! the finite shadow of an unbounded inverse, stays visible.

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::family::FamilyMatrix;
use crate::frame_ops::{analysis_matrix, frame_operator};
use crate::spectral::{
    max_norm, pseudo_inverse, CMatrix, EigenDecomposition, HVector, HermitianMatrix, RankTolerance, SpectralFunction,
    C64,
};

/// Relative residual above which a vector counts as outside a range.
pub const RANGE_TOLERANCE: f64 = 1e-8;

/// Regularity threshold: `‖S S⁺ ψ_k − ψ_k‖ ≤ 1e-9 ‖ψ_k‖`.
pub const REGULARITY_TOLERANCE: f64 = 1e-9;

/// The frame operator with its spectral functions, computed once.
#[derive(Clone, Debug)]
pub struct FrameSpectrum {
    pub s: HermitianMatrix,
    pub eig: EigenDecomposition,
    pub s_pinv: HermitianMatrix,
    pub s_half: HermitianMatrix,
    pub s_minus_half: HermitianMatrix,
    pub retained_rank: usize,
    pub total: bool,
}

pub fn frame_spectrum(psi: &FamilyMatrix, tol: RankTolerance) -> Result<FrameSpectrum> {
    let s = frame_operator(psi);
    let eig = s.eig()?;
    let s_pinv = eig.map(SpectralFunction::Inverse, tol)?;
    let s_half = eig.map(SpectralFunction::Sqrt, tol)?;
    let s_minus_half = eig.map(SpectralFunction::InverseSqrt, tol)?;
    let retained_rank = eig.rank(tol);
    Ok(FrameSpectrum { total: retained_rank == s.dim(), s, eig, s_pinv, s_half, s_minus_half, retained_rank })
}

/// `G = C D = Ψ*Ψ` and its spectral functions.
#[derive(Clone, Debug)]
pub struct GramOperators {
    pub g: HermitianMatrix,
    pub g_pinv: HermitianMatrix,
    pub g_half: HermitianMatrix,
    pub g_minus_half: HermitianMatrix,
    /// Orthogonal projector onto `range(G) = range(C)`.
    pub range_projector: CMatrix,
    pub retained_rank: usize,
    /// Descending eigenvalues of `G`.
    pub eigenvalues: Vec<f64>,
    cutoff: f64,
}

impl GramOperators {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    /// `λ_max(G) / λ_min⁺(G)` over retained eigenvalues.
    pub fn condition(&self) -> f64 {
        let retained: Vec<f64> = self.eigenvalues.iter().copied().filter(|l| l.abs() > self.cutoff).collect();
        match (retained.first(), retained.last()) {
            (Some(hi), Some(lo)) => hi / lo,
            _ => f64::INFINITY,
        }
    }

    /// Whether `c` lies in `range(C)` up to [`RANGE_TOLERANCE`].
    pub fn contains(&self, c: &HVector) -> bool {
        let p = &self.range_projector * c;
        (p - c).norm() <= RANGE_TOLERANCE * c.norm()
    }
}

pub fn gram_operators(psi: &FamilyMatrix, tol: RankTolerance) -> Result<GramOperators> {
    let cols = psi.columns();
    let g = HermitianMatrix::new(cols.adjoint() * cols)?;
    let eig = g.eig()?;
    Ok(GramOperators {
        g_pinv: eig.map(SpectralFunction::Inverse, tol)?,
        g_half: eig.map(SpectralFunction::Sqrt, tol)?,
        g_minus_half: eig.map(SpectralFunction::InverseSqrt, tol)?,
        range_projector: eig.range_projector(tol),
        retained_rank: eig.rank(tol),
        cutoff: eig.cutoff(tol),
        eigenvalues: eig.eigenvalues,
        g,
    })
}

/// Canonical dual `ψ̃_k = S⁺ψ_k`.
#[derive(Clone, Debug)]
pub struct CanonicalDual {
    pub family: FamilyMatrix,
    /// Set when `S` was rank deficient, so the dual only works on `span Ψ`.
    pub on_range_only: bool,
    pub retained_rank: usize,
}

pub fn canonical_dual(psi: &FamilyMatrix, tol: RankTolerance) -> Result<CanonicalDual> {
    let spec = frame_spectrum(psi, tol)?;
    dual_from_spectrum(psi, &spec)
}

fn dual_from_spectrum(psi: &FamilyMatrix, spec: &FrameSpectrum) -> Result<CanonicalDual> {
    let cols = spec.s_pinv.as_matrix() * psi.columns();
    let family = FamilyMatrix::new(cols, format!("dual({})", psi.label()))?;
    Ok(CanonicalDual { family, on_range_only: !spec.total, retained_rank: spec.retained_rank })
}

/// `P_Ψ = C S⁺ D`, the orthogonal projection of coefficient space onto `range(C)`.
pub fn projection_p(psi: &FamilyMatrix, tol: RankTolerance) -> Result<CMatrix> {
    let spec = frame_spectrum(psi, tol)?;
    let c = analysis_matrix(psi);
    Ok(c * spec.s_pinv.as_matrix() * psi.columns())
}

/// Result of a Ψ-inner product.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiInner {
    pub value: C64,
    /// Set when an argument had to be projected onto `range(C)`.
    pub projected: bool,
}

/// `⟨c, d⟩_Ψ = ⟨c, G⁺ d⟩`.
pub fn psi_inner(c: &HVector, d: &HVector, g: &GramOperators) -> Result<PsiInner> {
    let n = g.dim();
    for v in [c, d] {
        if v.len() != n {
            return Err(FrameError::dims(n, v.len()));
        }
    }
    let projected = !(g.contains(c) && g.contains(d));
    let pc = &g.range_projector * c;
    let pd = &g.range_projector * d;
    Ok(PsiInner { value: pc.dotc(&(g.g_pinv.as_matrix() * pd)), projected })
}

/// A reconstructed vector with its relative residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction {
    pub vector: HVector,
    /// `‖out − f‖ / ‖f‖`.
    pub residual: f64,
    /// The result is only the projection of `f` onto the span of the family.
    pub projected: bool,
}

fn relative_residual(out: &HVector, f: &HVector) -> f64 {
    let nf = f.norm();
    let diff = (out - f).norm();
    if nf == 0.0 {
        diff
    } else {
        diff / nf
    }
}

impl Reconstruction {
    fn new(vector: HVector, f: &HVector, projected: bool) -> Self {
        let residual = relative_residual(&vector, f);
        Self { vector, residual, projected }
    }
}

/// Both canonical-dual expansions of `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameReconstruction {
    /// `Σ_k ⟨ψ_k, f⟩ S⁻¹ψ_k`.
    pub dual_synthesis: Reconstruction,
    /// `Σ_k ⟨S⁻¹ψ_k, f⟩ ψ_k`.
    pub dual_analysis: Reconstruction,
}

pub fn reconstruct_frame(psi: &FamilyMatrix, f: &HVector, tol: RankTolerance) -> Result<FrameReconstruction> {
    check_dim(psi, f)?;
    let spec = frame_spectrum(psi, tol)?;
    let dual = dual_from_spectrum(psi, &spec)?;
    let cols = psi.columns();
    let dcols = dual.family.columns();
    let first = dcols * cols.ad_mul(f);
    let second = cols * dcols.ad_mul(f);
    let projected = !spec.total;
    Ok(FrameReconstruction {
        dual_synthesis: Reconstruction::new(first, f, projected),
        dual_analysis: Reconstruction::new(second, f, projected),
    })
}

/// `f = Σ_k [G⁻¹ Cf]_k ψ_k`, valid on `range(D)`.
pub fn reconstruct_rd(psi: &FamilyMatrix, f: &HVector, g: &GramOperators) -> Result<Reconstruction> {
    check_dim(psi, f)?;
    check_gram(psi, g)?;
    let cols = psi.columns();
    let coeffs = g.g_pinv.as_matrix() * cols.ad_mul(f);
    // D G⁺ C is the orthogonal projector onto range(D)
    let out = cols * coeffs;
    Ok(Reconstruction::new(out, f, g.retained_rank < psi.dim()))
}

/// `f = S^{-1/2} Σ_k [G^{-1/2} Cf]_k ψ_k`.
pub fn reconstruct_full(
    psi: &FamilyMatrix,
    f: &HVector,
    g: &GramOperators,
    tol: RankTolerance,
) -> Result<Reconstruction> {
    check_dim(psi, f)?;
    check_gram(psi, g)?;
    let spec = frame_spectrum(psi, tol)?;
    let cols = psi.columns();
    let inner = cols * (g.g_minus_half.as_matrix() * cols.ad_mul(f));
    let out = spec.s_minus_half.as_matrix() * inner;
    Ok(Reconstruction::new(out, f, !spec.total))
}

/// Residual of the factorization `S^{1/2} = D G^{-1/2} C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqrtFactorization {
    /// `‖S^{1/2} − D G^{-1/2} C‖_max / ‖S^{1/2}‖_max`.
    pub residual: f64,
    pub s_half_max: f64,
}

pub fn sqrt_factorization_check(psi: &FamilyMatrix, tol: RankTolerance) -> Result<SqrtFactorization> {
    let spec = frame_spectrum(psi, tol)?;
    let g = gram_operators(psi, tol)?;
    let cols = psi.columns();
    let product = cols * g.g_minus_half.as_matrix() * cols.adjoint();
    let s_half_max = max_norm(spec.s_half.as_matrix());
    let diff = max_norm(&(spec.s_half.as_matrix() - product));
    let residual = if s_half_max == 0.0 { diff } else { diff / s_half_max };
    Ok(SqrtFactorization { residual, s_half_max })
}

/// Reproducing kernel `𝒢_{k,l} = ⟨ψ_k, S⁻¹ψ_l⟩` on coefficient space.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelMatrix {
    pub entries: CMatrix,
}

impl KernelMatrix {
    pub fn apply(&self, c: &HVector) -> HVector {
        &self.entries * c
    }
}

pub fn kernel_matrix(psi: &FamilyMatrix, tol: RankTolerance) -> Result<KernelMatrix> {
    let dual = canonical_dual(psi, tol)?;
    let n = psi.count();
    let mut entries = CMatrix::zeros(n, n);
    for l in 0..n {
        let dl = dual.family.columns().column(l);
        for k in 0..n {
            entries[(k, l)] = psi.columns().column(k).dotc(&dl);
        }
    }
    Ok(KernelMatrix { entries })
}

/// The three coefficient norms of the triplet `H_Ψ ⊂ H₀ ⊂ H_Ψ^×` and the `𝔖`-norm on `H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripletReport {
    /// `⟨c, G⁺c⟩^{1/2}`.
    pub norm_psi: f64,
    /// `‖c‖_{ℓ²}`.
    pub norm_zero: f64,
    /// `⟨c, G c⟩^{1/2}`.
    pub norm_psi_cross: f64,
    /// `‖S⁺ f‖`.
    pub norm_s_frak: f64,
    /// `λ_max(G) / λ_min⁺(G)`.
    #[serde(with = "crate::report::non_finite")]
    pub gram_condition: f64,
    pub retained_rank: usize,
    /// Whether `c` lies in `range(C)`.
    pub coefficients_in_range: bool,
}

pub fn triplet_report(
    psi: &FamilyMatrix,
    c: &HVector,
    f: &HVector,
    g: &GramOperators,
    tol: RankTolerance,
) -> Result<TripletReport> {
    check_dim(psi, f)?;
    check_gram(psi, g)?;
    if c.len() != psi.count() {
        return Err(FrameError::dims(psi.count(), c.len()));
    }
    let spec = frame_spectrum(psi, tol)?;
    let quad = |m: &HermitianMatrix| c.dotc(&(m.as_matrix() * c)).re.max(0.0).sqrt();
    Ok(TripletReport {
        norm_psi: quad(&g.g_pinv),
        norm_zero: c.norm(),
        norm_psi_cross: quad(&g.g),
        norm_s_frak: (spec.s_pinv.as_matrix() * f).norm(),
        gram_condition: g.condition(),
        retained_rank: g.retained_rank,
        coefficients_in_range: g.contains(c),
    })
}

/// Upper semi-frame dual to a lower semi-frame `Φ`: `ψ_k = V e_k` with
/// `V = C_Φ⁺`, i.e. the columns of the pseudo-inverse of the analysis matrix.
pub fn dual_from_lower(phi: &FamilyMatrix, tol: RankTolerance) -> Result<FamilyMatrix> {
    let spec = frame_spectrum(phi, tol)?;
    if !spec.total {
        return Err(FrameError::NotLowerSemiFrame(format!(
            "frame operator has rank {} < {}",
            spec.retained_rank,
            phi.dim()
        )));
    }
    let v = pseudo_inverse(&analysis_matrix(phi), tol)?;
    FamilyMatrix::new(v, format!("lower_dual({})", phi.label()))
}

/// `‖D_Ψ C_Φ − I‖_max`: zero iff `f = Σ_k ⟨φ_k, f⟩ ψ_k` for all `f`.
pub fn duality_residual(psi: &FamilyMatrix, phi: &FamilyMatrix) -> Result<f64> {
    if psi.dim() != phi.dim() {
        return Err(FrameError::dims(psi.dim(), phi.dim()));
    }
    if psi.count() != phi.count() {
        return Err(FrameError::dims(psi.count(), phi.count()));
    }
    let d = psi.dim();
    Ok(max_norm(&(psi.columns() * phi.columns().adjoint() - CMatrix::identity(d, d))))
}

/// Lower-bound transfer for a dual pair: `λ_min(S_Φ) ≥ 1 / M(Ψ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualBoundReport {
    pub upper_bound_psi: f64,
    pub lower_bound_phi: f64,
    pub required: f64,
    pub duality_residual: f64,
    pub holds: bool,
}

pub const DUAL_BOUND_SLACK: f64 = 1e-9;

pub fn dual_bound_check(psi: &FamilyMatrix, phi: &FamilyMatrix) -> Result<DualBoundReport> {
    let residual = duality_residual(psi, phi)?;
    if residual > RANGE_TOLERANCE {
        return Err(FrameError::InvalidInput(format!("families are not dual: residual {residual:e}")));
    }
    let upper = frame_operator(psi).eig()?.largest();
    let lower = frame_operator(phi).eig()?.smallest();
    let required = 1.0 / upper;
    Ok(DualBoundReport {
        upper_bound_psi: upper,
        lower_bound_phi: lower,
        required,
        duality_residual: residual,
        holds: lower >= required - DUAL_BOUND_SLACK,
    })
}

/// Whether every `ψ_k` lies in the domain of the truncated `S⁻¹`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub regular: bool,
    /// `max_k ‖S S⁺ ψ_k − ψ_k‖ / ‖ψ_k‖`.
    pub worst_residual: f64,
    pub irregular_columns: Vec<usize>,
    pub retained_rank: usize,
}

pub fn regularity(psi: &FamilyMatrix, tol: RankTolerance) -> Result<RegularityReport> {
    let spec = frame_spectrum(psi, tol)?;
    let proj = spec.s.as_matrix() * spec.s_pinv.as_matrix();
    let mut worst: f64 = 0.0;
    let mut irregular = Vec::new();
    for k in 0..psi.count() {
        let v = psi.column(k);
        let r = relative_residual(&(&proj * &v), &v);
        if r > REGULARITY_TOLERANCE {
            irregular.push(k);
        }
        worst = worst.max(r);
    }
    Ok(RegularityReport {
        regular: irregular.is_empty(),
        worst_residual: worst,
        irregular_columns: irregular,
        retained_rank: spec.retained_rank,
    })
}

/// `‖S S⁺ v − v‖ / ‖v‖`: how much of `v` the rank cutoff of `S` throws away.
/// Above [`REGULARITY_TOLERANCE`], `v` is outside the domain of the truncated `S⁻¹`.
pub fn domain_residual(s: &HermitianMatrix, v: &HVector, tol: RankTolerance) -> Result<f64> {
    if v.len() != s.dim() {
        return Err(FrameError::dims(s.dim(), v.len()));
    }
    let proj = s.eig()?.range_projector(tol);
    Ok(relative_residual(&(proj * v), v))
}

fn check_dim(psi: &FamilyMatrix, f: &HVector) -> Result<()> {
    if f.len() != psi.dim() {
        return Err(FrameError::dims(psi.dim(), f.len()));
    }
    Ok(())
}

fn check_gram(psi: &FamilyMatrix, g: &GramOperators) -> Result<()> {
    if g.dim() != psi.count() {
        return Err(FrameError::dims(psi.count(), g.dim()));
    }
    Ok(())
}
