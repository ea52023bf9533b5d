//! Weighted frames and frames of subspaces (fusion frames).
//!
//! Subspaces are stored as orthonormal bases, so every projector is `B B*`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::dual_recon::Reconstruction;
use crate::error::{FrameError, Result};
use crate::family::FamilyMatrix;
use crate::frame_ops::{diagnostics, diagnostics_of_operator, FrameDiagnostics};
use crate::spectral::{CMatrix, HVector, HermitianMatrix, RankTolerance, SpectralFunction, C64};

/// Vectors shorter than this fraction of their original norm after
/// orthogonalization are treated as dependent.
const DEPENDENCE_TOLERANCE: f64 = 1e-10;

/// A family with positive per-column weights `v_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedFamily {
    base: FamilyMatrix,
    weights: Vec<f64>,
}

impl WeightedFamily {
    pub fn new(base: FamilyMatrix, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != base.count() {
            return Err(FrameError::dims(base.count(), weights.len()));
        }
        check_weights(&weights)?;
        Ok(Self { base, weights })
    }

    pub fn base(&self) -> &FamilyMatrix {
        &self.base
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(FrameError::InvalidInput(format!("weights must be positive, got {w}")));
    }
    Ok(())
}

/// Columns `v_k ψ_k`; its plain frame operator is `Σ v_k² ψ_k ψ_k*`.
pub fn weighted_to_plain(w: &WeightedFamily) -> FamilyMatrix {
    let mut cols = w.base.columns().clone();
    for (k, &v) in w.weights.iter().enumerate() {
        cols.column_mut(k).scale_mut(v);
    }
    FamilyMatrix::new(cols, format!("weighted({})", w.base.label())).expect("positive weights keep columns nonzero")
}

/// Weighted closed subspaces `{(H_j, v_j)}` of `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceFamily {
    dim: usize,
    bases: Vec<CMatrix>,
    weights: Vec<f64>,
}

impl SubspaceFamily {
    /// Orthonormalizes each spanning set (Gram–Schmidt, two passes), dropping dependent vectors.
    pub fn new(spanning_sets: Vec<CMatrix>, weights: Vec<f64>) -> Result<Self> {
        if spanning_sets.is_empty() {
            return Err(FrameError::InvalidInput("need at least one subspace".into()));
        }
        if spanning_sets.len() != weights.len() {
            return Err(FrameError::dims(spanning_sets.len(), weights.len()));
        }
        check_weights(&weights)?;
        let dim = spanning_sets[0].nrows();
        if dim == 0 {
            return Err(FrameError::InvalidInput("subspaces must live in a positive dimension".into()));
        }
        let mut bases = Vec::with_capacity(spanning_sets.len());
        for (j, set) in spanning_sets.iter().enumerate() {
            if set.nrows() != dim {
                return Err(FrameError::dims(dim, set.nrows()));
            }
            crate::spectral::ensure_finite(set)?;
            let basis = orthonormalize(set);
            if basis.ncols() == 0 {
                return Err(FrameError::InvalidInput(format!("subspace {j} is spanned by zero vectors")));
            }
            bases.push(basis);
        }
        Ok(Self { dim, bases, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[CMatrix] {
        &self.bases
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `π_{H_j} = B_j B_j*`.
    pub fn projector(&self, j: usize) -> CMatrix {
        &self.bases[j] * self.bases[j].adjoint()
    }
}

/// Modified Gram–Schmidt with reorthogonalization.
pub fn orthonormalize(set: &CMatrix) -> CMatrix {
    let mut out: Vec<HVector> = Vec::with_capacity(set.ncols());
    for k in 0..set.ncols() {
        let original = set.column(k).into_owned();
        let scale = original.norm();
        if scale == 0.0 {
            continue;
        }
        let mut v = original;
        for _ in 0..2 {
            for q in &out {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let n = v.norm();
        if n > DEPENDENCE_TOLERANCE * scale {
            out.push(v.unscale(n));
        }
    }
    if out.is_empty() {
        return CMatrix::zeros(set.nrows(), 0);
    }
    CMatrix::from_columns(&out)
}

/// `D_{W,v} f = {v_j π_{H_j} f}`.
pub fn fusion_analysis(fam: &SubspaceFamily, f: &HVector) -> Result<Vec<HVector>> {
    if f.len() != fam.dim {
        return Err(FrameError::dims(fam.dim, f.len()));
    }
    Ok(fam
        .bases
        .iter()
        .zip(&fam.weights)
        .map(|(b, &v)| (b * b.ad_mul(f)).scale(v))
        .collect())
}

/// `C_{W,v} {f_j} = Σ_j v_j f_j`.
pub fn fusion_synthesis(fam: &SubspaceFamily, components: &[HVector]) -> Result<HVector> {
    if components.len() != fam.len() {
        return Err(FrameError::dims(fam.len(), components.len()));
    }
    let mut out = HVector::zeros(fam.dim);
    for (c, &v) in components.iter().zip(&fam.weights) {
        if c.len() != fam.dim {
            return Err(FrameError::dims(fam.dim, c.len()));
        }
        out += c.scale(v);
    }
    Ok(out)
}

/// `S_{W,v} = Σ_j v_j² π_{H_j}`.
pub fn fusion_frame_operator(fam: &SubspaceFamily) -> HermitianMatrix {
    let mut s = CMatrix::zeros(fam.dim, fam.dim);
    for (b, &v) in fam.bases.iter().zip(&fam.weights) {
        s += (b * b.adjoint()).scale(v * v);
    }
    HermitianMatrix::new(s).expect("finite projector sum")
}

pub fn fusion_diagnostics(fam: &SubspaceFamily, tol: RankTolerance) -> Result<FrameDiagnostics> {
    diagnostics_of_operator(&fusion_frame_operator(fam), fam.len(), tol)
}

/// `f = Σ_j v_j² S⁻¹ π_{H_j} f`; projects onto `Σ H_j` when the subspaces do not span.
pub fn fusion_reconstruct(fam: &SubspaceFamily, f: &HVector, tol: RankTolerance) -> Result<Reconstruction> {
    let components = fusion_analysis(fam, f)?;
    let s = fusion_frame_operator(fam);
    let eig = s.eig()?;
    let total = eig.rank(tol) == fam.dim;
    let s_pinv = eig.map(SpectralFunction::Inverse, tol)?;
    let mut out = HVector::zeros(fam.dim);
    for (c, &v) in components.iter().zip(&fam.weights) {
        // v_j (v_j π_j f) = v_j² π_j f
        out += s_pinv.as_matrix() * c.scale(v);
    }
    let residual = (&out - f).norm() / f.norm().max(f64::MIN_POSITIVE);
    Ok(Reconstruction { vector: out, residual, projected: !total })
}

/// Dual subspaces `S⁺ H_j` with the same weights.
pub fn fusion_dual(fam: &SubspaceFamily, tol: RankTolerance) -> Result<SubspaceFamily> {
    let s_pinv = fusion_frame_operator(fam).eig()?.map(SpectralFunction::Inverse, tol)?;
    let images: Vec<CMatrix> = fam.bases.iter().map(|b| s_pinv.as_matrix() * b).collect();
    SubspaceFamily::new(images, fam.weights.clone())
}

/// `‖Σ_j v_j² π_{S⁻¹H_j} S⁻¹ π_{H_j} − I‖_max` for a family and its canonical dual.
pub fn fusion_duality_residual(fam: &SubspaceFamily, dual: &SubspaceFamily, tol: RankTolerance) -> Result<f64> {
    if fam.len() != dual.len() {
        return Err(FrameError::dims(fam.len(), dual.len()));
    }
    if fam.dim != dual.dim {
        return Err(FrameError::dims(fam.dim, dual.dim));
    }
    let s_pinv = fusion_frame_operator(fam).eig()?.map(SpectralFunction::Inverse, tol)?;
    let mut acc = CMatrix::zeros(fam.dim, fam.dim);
    for j in 0..fam.len() {
        let v = fam.weights[j];
        acc += (dual.projector(j) * s_pinv.as_matrix() * fam.projector(j)).scale(v * v);
    }
    Ok(crate::spectral::max_norm(&(acc - CMatrix::identity(fam.dim, fam.dim))))
}

/// Diagnostics of a frame of subspaces, its canonical dual, and one reconstruction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FusionReport {
    pub subspace_dims: Vec<usize>,
    pub weights: Vec<f64>,
    pub diagnostics: FrameDiagnostics,
    pub dual_diagnostics: FrameDiagnostics,
    pub duality_residual: f64,
    /// Largest principal angle between `H_j` and the dual of the dual.
    pub dual_of_dual_angle: f64,
    pub reconstruction_residual: f64,
    pub projected: bool,
}

pub fn fusion_report(fam: &SubspaceFamily, f: &HVector, tol: RankTolerance) -> Result<FusionReport> {
    let diagnostics = fusion_diagnostics(fam, tol)?;
    let dual = fusion_dual(fam, tol)?;
    let dual_diagnostics = fusion_diagnostics(&dual, tol)?;
    let duality_residual = fusion_duality_residual(fam, &dual, tol)?;
    let dd = fusion_dual(&dual, tol)?;
    let mut dual_of_dual_angle: f64 = 0.0;
    for (a, b) in fam.bases.iter().zip(dd.bases()) {
        if a.ncols() != b.ncols() {
            dual_of_dual_angle = std::f64::consts::FRAC_PI_2;
            continue;
        }
        for t in principal_angles(a, b)? {
            dual_of_dual_angle = dual_of_dual_angle.max(t);
        }
    }
    let rec = fusion_reconstruct(fam, f, tol)?;
    Ok(FusionReport {
        subspace_dims: fam.bases.iter().map(|b| b.ncols()).collect(),
        weights: fam.weights.clone(),
        diagnostics,
        dual_diagnostics,
        duality_residual,
        dual_of_dual_angle,
        reconstruction_residual: rec.residual,
        projected: rec.projected,
    })
}

/// Principal angles between two subspaces of equal dimension, ascending.
///
/// Computed from `sin θ`, the singular values of `(I − B Bᵃ) A`, which keeps
/// small angles accurate.
pub fn principal_angles(a: &CMatrix, b: &CMatrix) -> Result<Vec<f64>> {
    if a.nrows() != b.nrows() {
        return Err(FrameError::dims(a.nrows(), b.nrows()));
    }
    if a.ncols() != b.ncols() {
        return Err(FrameError::dims(a.ncols(), b.ncols()));
    }
    let residual = a - b * b.ad_mul(a);
    let gram = HermitianMatrix::new(residual.ad_mul(&residual))?;
    let mut angles: Vec<f64> = gram
        .eig()?
        .eigenvalues
        .iter()
        .map(|&s2| s2.clamp(0.0, 1.0).sqrt().asin())
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Bound transfer from a block-weighted family to its frame of block spans.
///
/// With plain bounds `(m, M)` of `{v_j ψ_ij}` and per-block frame bounds
/// `A = inf A_j`, `B = sup B_j`, the subspace family has bounds within
/// `[m / B, M / A]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundTransfer {
    pub plain: FrameDiagnostics,
    pub fusion: FrameDiagnostics,
    pub block_lower: f64,
    pub block_upper: f64,
    pub predicted_lower: f64,
    pub predicted_upper: f64,
    pub holds: bool,
}

/// Per-block frame bounds of a family of columns, for its own span.
fn block_bounds(cols: &CMatrix, tol: RankTolerance) -> Result<(f64, f64)> {
    let eig = HermitianMatrix::new(cols * cols.adjoint())?.eig()?;
    let cutoff = eig.cutoff(tol);
    let retained: Vec<f64> = eig.eigenvalues.iter().copied().filter(|l| *l > cutoff).collect();
    match (retained.last(), retained.first()) {
        (Some(&lo), Some(&hi)) => Ok((lo, hi)),
        _ => Err(FrameError::InvalidInput("block spans the zero subspace".into())),
    }
}

/// Splits `base` into consecutive column blocks with one weight each.
pub fn blocked_subspaces(base: &FamilyMatrix, blocks: &[Range<usize>], block_weights: &[f64]) -> Result<SubspaceFamily> {
    check_blocks(base, blocks, block_weights)?;
    let sets = blocks.iter().map(|r| base.columns().columns(r.start, r.len()).into_owned()).collect();
    SubspaceFamily::new(sets, block_weights.to_vec())
}

fn check_blocks(base: &FamilyMatrix, blocks: &[Range<usize>], block_weights: &[f64]) -> Result<()> {
    if blocks.len() != block_weights.len() {
        return Err(FrameError::dims(blocks.len(), block_weights.len()));
    }
    for r in blocks {
        if r.is_empty() || r.end > base.count() {
            return Err(FrameError::InvalidInput(format!("invalid column block {r:?}")));
        }
    }
    Ok(())
}

/// Weighted family with weight `block_weights[j]` on every column of `blocks[j]`.
pub fn block_weighted(base: &FamilyMatrix, blocks: &[Range<usize>], block_weights: &[f64]) -> Result<WeightedFamily> {
    check_blocks(base, blocks, block_weights)?;
    let mut weights = vec![f64::NAN; base.count()];
    for (r, &v) in blocks.iter().zip(block_weights) {
        for k in r.clone() {
            weights[k] = v;
        }
    }
    if weights.iter().any(|w| w.is_nan()) {
        return Err(FrameError::InvalidInput("blocks must cover every column".into()));
    }
    WeightedFamily::new(base.clone(), weights)
}

pub fn bound_transfer(
    base: &FamilyMatrix,
    blocks: &[Range<usize>],
    block_weights: &[f64],
    tol: RankTolerance,
) -> Result<BoundTransfer> {
    let weighted = weighted_to_plain(&block_weighted(base, blocks, block_weights)?);
    let plain = diagnostics(&weighted, tol)?;
    let subspaces = blocked_subspaces(base, blocks, block_weights)?;
    let fusion = fusion_diagnostics(&subspaces, tol)?;
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    for r in blocks {
        let (a, b) = block_bounds(&base.columns().columns(r.start, r.len()).into_owned(), tol)?;
        lower = lower.min(a);
        upper = upper.max(b);
    }
    let predicted_lower = plain.lower_bound / upper;
    let predicted_upper = plain.upper_bound / lower;
    let slack = 1e-10 * fusion.upper_bound.max(1.0);
    let holds = fusion.lower_bound >= predicted_lower - slack && fusion.upper_bound <= predicted_upper + slack;
    Ok(BoundTransfer {
        plain,
        fusion,
        block_lower: lower,
        block_upper: upper,
        predicted_lower,
        predicted_upper,
        holds,
    })
}

/// Embeds real column data; convenience for examples.
pub fn real_columns(rows: usize, cols: usize, data_column_major: &[f64]) -> CMatrix {
    CMatrix::from_iterator(rows, cols, data_column_major.iter().map(|&x| C64::new(x, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame_ops::frame_operator;
    use crate::spectral::{max_norm, real_vector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: RankTolerance = RankTolerance::DEFAULT;

    fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        CMatrix::from_fn(r, c, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn unit(d: usize, i: usize) -> CMatrix {
        let mut m = CMatrix::zeros(d, 1);
        m[(i, 0)] = C64::new(1.0, 0.0);
        m
    }

    #[test]
    fn weighted_examples() {
        let base = FamilyMatrix::identity(4);
        let same = weighted_to_plain(&WeightedFamily::new(base.clone(), vec![1.0; 4]).unwrap());
        assert_eq!(same.columns(), base.columns());

        let w: Vec<f64> = (1..=4).map(|k| 1.0 / k as f64).collect();
        let plain = weighted_to_plain(&WeightedFamily::new(base, w.clone()).unwrap());
        assert_eq!(plain.columns(), &CMatrix::from_diagonal(&real_vector(&w)));

        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let base = FamilyMatrix::new(random_matrix(3, 5, &mut rng), "r").unwrap();
        let weights: Vec<f64> = (0..5).map(|_| rng.random_range(0.1..2.0)).collect();
        let s = frame_operator(&weighted_to_plain(&WeightedFamily::new(base.clone(), weights.clone()).unwrap()));
        let mut acc = CMatrix::zeros(3, 3);
        for (k, w) in weights.iter().enumerate() {
            let v = base.column(k);
            acc += (&v * v.adjoint()).scale(w * w);
        }
        assert!(max_norm(&(s.as_matrix() - acc)) < 1e-12);

        assert!(WeightedFamily::new(FamilyMatrix::identity(2), vec![1.0, 0.0]).is_err());
        assert!(WeightedFamily::new(FamilyMatrix::identity(2), vec![1.0]).is_err());
    }

    #[test]
    fn construction_orthonormalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let fam = SubspaceFamily::new(vec![random_matrix(5, 3, &mut rng)], vec![1.0]).unwrap();
        let b = &fam.bases()[0];
        assert!(max_norm(&(b.adjoint() * b - CMatrix::identity(3, 3))) <= 1e-10);
        // dependent spanning vectors are dropped
        let set = real_columns(3, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert_eq!(SubspaceFamily::new(vec![set], vec![1.0]).unwrap().bases()[0].ncols(), 2);
        assert!(SubspaceFamily::new(vec![CMatrix::zeros(3, 1)], vec![1.0]).is_err());
        assert!(SubspaceFamily::new(vec![unit(3, 0), unit(2, 0)], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn analysis_examples() {
        let f = real_vector(&[1.0, 2.0, 3.0]);
        let whole = SubspaceFamily::new(vec![CMatrix::identity(3, 3)], vec![1.0]).unwrap();
        let comps = fusion_analysis(&whole, &f).unwrap();
        assert!((comps[0].clone() - &f).norm() < 1e-15);

        let axes = SubspaceFamily::new(vec![unit(2, 0), unit(2, 1)], vec![1.0, 1.0]).unwrap();
        let comps = fusion_analysis(&axes, &real_vector(&[3.0, 4.0])).unwrap();
        assert_eq!(comps, vec![real_vector(&[3.0, 0.0]), real_vector(&[0.0, 4.0])]);

        let fam = SubspaceFamily::new(vec![unit(3, 0), unit(3, 1)], vec![1.0, 2.0]).unwrap();
        let comps = fusion_analysis(&fam, &real_vector(&[0.0, 0.0, 5.0])).unwrap();
        assert!(comps.iter().all(|c| c.norm() == 0.0));
        // synthesis is the adjoint
        let f = real_vector(&[1.0, -1.0, 2.0]);
        let back = fusion_synthesis(&fam, &fusion_analysis(&fam, &f).unwrap()).unwrap();
        assert!((back - fusion_frame_operator(&fam).as_matrix() * &f).norm() < 1e-14);
    }

    #[test]
    fn frame_operator_examples() {
        let axes = SubspaceFamily::new(vec![unit(3, 0), real_columns(3, 2, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0])], vec![1.0, 1.0]).unwrap();
        assert!(max_norm(&(fusion_frame_operator(&axes).into_matrix() - CMatrix::identity(3, 3))) < 1e-15);

        let line = real_columns(2, 1, &[1.0, 1.0]);
        let doubled = SubspaceFamily::new(vec![line.clone(), line], vec![1.0, 1.0]).unwrap();
        let d = fusion_diagnostics(&doubled, TOL).unwrap();
        assert!((d.upper_bound - 2.0).abs() < 1e-14);
        assert!(!d.total);
        assert_eq!(d.rank, 1);

        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let fam = SubspaceFamily::new(
            vec![random_matrix(4, 2, &mut rng), random_matrix(4, 2, &mut rng), random_matrix(4, 1, &mut rng)],
            vec![1.0, 0.5, 2.0],
        )
        .unwrap();
        let d = fusion_diagnostics(&fam, TOL).unwrap();
        assert!(d.total && d.lower_bound > 0.0);
        let s = fusion_frame_operator(&fam);
        for _ in 0..1000 {
            let f = random_matrix(4, 1, &mut rng).column(0).into_owned();
            let q: f64 = fusion_analysis(&fam, &f).unwrap().iter().map(|c| c.norm_squared()).sum();
            assert!((q - s.quadratic_form(&f).unwrap()).abs() <= 1e-12 * q);
            let n2 = f.norm_squared();
            assert!(d.lower_bound * n2 <= q * (1.0 + 1e-10) && q <= d.upper_bound * n2 * (1.0 + 1e-10));
        }
    }

    #[test]
    fn reconstruct_examples() {
        let f = real_vector(&[1.0, -2.0, 0.5]);
        let axes = SubspaceFamily::new(vec![unit(3, 0), unit(3, 1), unit(3, 2)], vec![1.0; 3]).unwrap();
        assert!(fusion_reconstruct(&axes, &f, TOL).unwrap().residual < 1e-15);

        let overlapping = SubspaceFamily::new(
            vec![real_columns(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]), real_columns(3, 2, &[0.0, 1.0, 0.0, 0.0, 1.0, 1.0])],
            vec![1.0, 3.0],
        )
        .unwrap();
        let r = fusion_reconstruct(&overlapping, &f, TOL).unwrap();
        // oracle: dense solve of S x = Σ v_j² π_j f
        let s = fusion_frame_operator(&overlapping).into_matrix();
        let rhs = &s * &f;
        let x = s.lu().solve(&rhs).unwrap();
        assert!((x - &f).norm() < 1e-12);
        assert!(r.residual <= 1e-8 && !r.projected);

        let plane = SubspaceFamily::new(vec![unit(3, 0), unit(3, 1)], vec![1.0, 1.0]).unwrap();
        let r = fusion_reconstruct(&plane, &f, TOL).unwrap();
        assert!(r.projected);
        assert!((r.vector - real_vector(&[1.0, -2.0, 0.0])).norm() < 1e-14);
    }

    #[test]
    fn dual_examples() {
        let axes = SubspaceFamily::new(vec![unit(2, 0), unit(2, 1)], vec![1.0, 1.0]).unwrap();
        let dual = fusion_dual(&axes, TOL).unwrap();
        assert_eq!(dual.bases(), axes.bases());
        assert_eq!(dual.weights(), axes.weights());

        // S = diag(s_i); dual subspace = span of diag(1/s_i) b, normalized
        let b = real_columns(2, 1, &[1.0, 1.0]);
        let fam = SubspaceFamily::new(vec![unit(2, 0), b], vec![2.0, 1.0]).unwrap();
        let s = fusion_frame_operator(&fam).into_matrix();
        let image = s.clone().try_inverse().unwrap() * real_columns(2, 1, &[1.0, 1.0]);
        let image = image.unscale(image.norm());
        let dual = fusion_dual(&fam, TOL).unwrap();
        assert!(principal_angles(&dual.bases()[1], &image).unwrap()[0] < 1e-12);

        // two lines in C^2: the dual of the dual is the original
        let dd = fusion_dual(&dual, TOL).unwrap();
        for (a, b) in fam.bases().iter().zip(dd.bases()) {
            assert!(principal_angles(a, b).unwrap()[0] < 1e-12);
        }

        // tight case: S = c I, so every dual subspace is the subspace itself
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let q = orthonormalize(&random_matrix(4, 4, &mut rng));
        let tight = SubspaceFamily::new(vec![q.columns(0, 2).into_owned(), q.columns(2, 2).into_owned()], vec![1.5, 1.5]).unwrap();
        let dd = fusion_dual(&fusion_dual(&tight, TOL).unwrap(), TOL).unwrap();
        for (a, b) in tight.bases().iter().zip(dd.bases()) {
            assert!(principal_angles(a, b).unwrap().into_iter().fold(0.0, f64::max) <= 1e-12);
        }
    }

    #[test]
    fn duality_residual_vanishes_for_canonical_dual() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let fam = SubspaceFamily::new(
            vec![random_matrix(5, 2, &mut rng), random_matrix(5, 3, &mut rng), random_matrix(5, 1, &mut rng)],
            vec![1.0, 2.0, 0.7],
        )
        .unwrap();
        let dual = fusion_dual(&fam, TOL).unwrap();
        assert!(fusion_duality_residual(&fam, &dual, TOL).unwrap() < 1e-12);
        // a different family with the same subspace count is not a dual
        assert!(fusion_duality_residual(&fam, &fam, TOL).unwrap() > 1e-3);
        let f = random_matrix(5, 1, &mut rng).column(0).into_owned();
        let report = fusion_report(&fam, &f, TOL).unwrap();
        assert_eq!(report.subspace_dims, vec![2, 3, 1]);
        assert!(report.reconstruction_residual < 1e-12 && !report.projected);
    }

    #[test]
    fn principal_angle_of_perpendicular_lines() {
        let a = principal_angles(&unit(2, 0), &unit(2, 1)).unwrap();
        assert!((a[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!(principal_angles(&unit(2, 0), &CMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn principal_angles_match_cosine_route() {
        // oracle: cos θ are the singular values of A* B
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for k in 1..=3 {
            let a = orthonormalize(&random_matrix(6, k, &mut rng));
            let b = orthonormalize(&random_matrix(6, k, &mut rng));
            let mut from_cos: Vec<f64> =
                a.ad_mul(&b).singular_values().iter().map(|c| c.clamp(0.0, 1.0).acos()).collect();
            from_cos.sort_by(f64::total_cmp);
            let angles = principal_angles(&a, &b).unwrap();
            for (x, y) in angles.iter().zip(&from_cos) {
                assert!((x - y).abs() < 1e-7, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn block_reduction_matches_plain_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let q1 = orthonormalize(&random_matrix(5, 2, &mut rng));
        let q2 = orthonormalize(&random_matrix(5, 3, &mut rng));
        let base = FamilyMatrix::new(CMatrix::from_columns(&[q1.column(0), q1.column(1), q2.column(0), q2.column(1), q2.column(2)]), "b").unwrap();
        let blocks = [0..2, 2..5];
        let weights = [0.8, 1.7];
        let plain = frame_operator(&weighted_to_plain(&block_weighted(&base, &blocks, &weights).unwrap()));
        let fusion = fusion_frame_operator(&blocked_subspaces(&base, &blocks, &weights).unwrap());
        assert!(max_norm(&(plain.as_matrix() - fusion.as_matrix())) <= 1e-10);
    }

    #[test]
    fn bound_transfer_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let base = FamilyMatrix::new(random_matrix(4, 9, &mut rng), "r").unwrap();
        let report = bound_transfer(&base, &[0..3, 3..6, 6..9], &[1.0, 0.5, 2.0], TOL).unwrap();
        assert!(report.holds, "{report:?}");
        assert!(report.predicted_lower <= report.fusion.lower_bound);
        assert!(block_weighted(&base, &[0..3, 3..5], &[1.0, 1.0]).is_err());
    }
}
