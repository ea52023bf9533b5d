//! Analysis, synthesis and frame operators, sharp frame bounds, and the
//! frame / semi-frame classification of a generator over a truncation sweep.
//!
//! Inner products are conjugate-linear in the first argument, so the analysis
//! operator is `C = Ψ*` and the synthesis operator is `D = Ψ`.

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::family::{FamilyGenerator, FamilyMatrix, TruncationSweep};
use crate::spectral::{CMatrix, HVector, HermitianMatrix, RankTolerance};

/// `(Cf)_k = ⟨ψ_k, f⟩`.
pub fn analysis(psi: &FamilyMatrix, f: &HVector) -> Result<HVector> {
    if f.len() != psi.dim() {
        return Err(FrameError::dims(psi.dim(), f.len()));
    }
    Ok(psi.columns().ad_mul(f))
}

/// `Dc = Σ_k c_k ψ_k`.
pub fn synthesis(psi: &FamilyMatrix, c: &HVector) -> Result<HVector> {
    if c.len() != psi.count() {
        return Err(FrameError::dims(psi.count(), c.len()));
    }
    Ok(psi.columns() * c)
}

/// Matrix of `C`, `N x d`.
pub fn analysis_matrix(psi: &FamilyMatrix) -> CMatrix {
    psi.columns().adjoint()
}

/// `S = Σ_k ψ_k ψ_k* = D C`.
pub fn frame_operator(psi: &FamilyMatrix) -> HermitianMatrix {
    let c = psi.columns();
    HermitianMatrix::new(c * c.adjoint()).expect("family entries are finite")
}

/// Spectral frame bounds of one truncation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameDiagnostics {
    pub dim: usize,
    pub count: usize,
    /// `λ_min(S)`, reported as 0 when at or below the rank cutoff.
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub rank: usize,
    pub total: bool,
    /// Always true at finite dimension.
    pub bessel: bool,
    /// `M / m`, infinite when `m = 0`.
    #[serde(with = "crate::report::non_finite")]
    pub condition: f64,
}

impl FrameDiagnostics {
    pub fn is_tight(&self, rel: f64) -> bool {
        self.total && (self.upper_bound - self.lower_bound).abs() <= rel * self.upper_bound
    }
}

pub fn diagnostics(psi: &FamilyMatrix, tol: RankTolerance) -> Result<FrameDiagnostics> {
    diagnostics_of_operator(&frame_operator(psi), psi.count(), tol)
}

/// Bounds from an already assembled positive semidefinite frame operator.
pub fn diagnostics_of_operator(s: &HermitianMatrix, count: usize, tol: RankTolerance) -> Result<FrameDiagnostics> {
    let e = s.eig()?;
    let upper = e.largest().max(0.0);
    let rank = e.rank(tol);
    let total = rank == s.dim();
    let lower = if total { e.smallest() } else { 0.0 };
    let condition = if total { upper / lower } else { f64::INFINITY };
    Ok(FrameDiagnostics {
        dim: s.dim(),
        count,
        lower_bound: lower,
        upper_bound: upper,
        rank,
        total,
        bessel: true,
        condition,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Frame,
    UpperSemiFrame,
    LowerSemiFrame,
    Neither,
    Inconclusive,
}

/// Exponent thresholds for the log-log trend rules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyThresholds {
    /// `|exponent| < bounded` counts as a bounded trend.
    pub bounded: f64,
    /// `|exponent| > unbounded` (with the right sign) counts as divergence.
    pub unbounded: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        Self { bounded: 0.1, unbounded: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub dim: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub rank: usize,
    pub total: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepVerdict {
    pub points: Vec<SweepPoint>,
    /// Slope of `log m(d)` against `log d`; absent when some truncation is not total.
    pub lower_exponent: Option<f64>,
    /// Slope of `log M(d)` against `log d`.
    pub upper_exponent: Option<f64>,
    pub verdict: Verdict,
    pub thresholds: ClassifyThresholds,
}

pub fn classify_sweep(g: &FamilyGenerator, dims: &TruncationSweep) -> Result<SweepVerdict> {
    classify_sweep_with(g, dims, RankTolerance::default(), ClassifyThresholds::default())
}

pub fn classify_sweep_with(
    g: &FamilyGenerator,
    dims: &TruncationSweep,
    tol: RankTolerance,
    thresholds: ClassifyThresholds,
) -> Result<SweepVerdict> {
    if dims.dims().len() < 3 {
        return Err(FrameError::InvalidInput(format!(
            "classification needs at least 3 truncations, got {}",
            dims.dims().len()
        )));
    }
    let mut points = Vec::with_capacity(dims.dims().len());
    for &d in dims.dims() {
        let diag = diagnostics(&g.produce(d)?, tol)?;
        points.push(SweepPoint {
            dim: d,
            lower_bound: diag.lower_bound,
            upper_bound: diag.upper_bound,
            rank: diag.rank,
            total: diag.total,
        });
    }
    Ok(classify_points(points, thresholds))
}

/// Applies the trend rules to precomputed bounds, sorted by dimension.
pub fn classify_points(mut points: Vec<SweepPoint>, thresholds: ClassifyThresholds) -> SweepVerdict {
    points.sort_by_key(|p| p.dim);
    let total_count = points.iter().filter(|p| p.total).count();
    let upper_exponent = loglog_slope(&points, |p| p.upper_bound);
    if total_count < points.len() {
        let verdict = if total_count == 0 { Verdict::Neither } else { Verdict::Inconclusive };
        return SweepVerdict { points, lower_exponent: None, upper_exponent, verdict, thresholds };
    }
    let lower_exponent = loglog_slope(&points, |p| p.lower_bound);
    let verdict = match (lower_exponent, upper_exponent) {
        (Some(a), Some(b)) => {
            let bounded = |x: f64| x.abs() < thresholds.bounded;
            if bounded(a) && bounded(b) {
                Verdict::Frame
            } else if bounded(b) && a < -thresholds.unbounded {
                Verdict::UpperSemiFrame
            } else if bounded(a) && b > thresholds.unbounded {
                Verdict::LowerSemiFrame
            } else if a < -thresholds.unbounded && b > thresholds.unbounded {
                Verdict::Neither
            } else {
                Verdict::Inconclusive
            }
        }
        _ => Verdict::Inconclusive,
    };
    SweepVerdict { points, lower_exponent, upper_exponent, verdict, thresholds }
}

/// Least-squares slope of `log y` against `log d`.
fn loglog_slope(points: &[SweepPoint], y: impl Fn(&SweepPoint) -> f64) -> Option<f64> {
    let xs: Vec<f64> = points.iter().map(|p| (p.dim as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| y(p).ln()).collect();
    if xs.len() < 2 || ys.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{DiagonalWeights, WeightRule};
    use crate::spectral::{max_norm, real_vector, C64};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inverse_k(d: usize) -> FamilyMatrix {
        let w: Vec<f64> = (1..=d).map(|k| 1.0 / k as f64).collect();
        FamilyMatrix::from_real_diagonal(&w, "1/k").unwrap()
    }

    fn random_family(d: usize, n: usize, seed: u64) -> FamilyMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = CMatrix::from_fn(d, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        FamilyMatrix::new(m, "random").unwrap()
    }

    #[test]
    fn analysis_examples() {
        let f = real_vector(&[1.0, 2.0, 3.0]);
        assert_eq!(analysis(&FamilyMatrix::identity(3), &f).unwrap(), f);

        let c = analysis(&inverse_k(3), &real_vector(&[0.0, 1.0, 0.0])).unwrap();
        assert_eq!(c, real_vector(&[0.0, 0.5, 0.0]));
        assert!((c.norm_squared() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn analysis_matches_naive_loop() {
        let psi = random_family(3, 5, 1);
        let f = random_family(3, 1, 2).column(0);
        let c = analysis(&psi, &f).unwrap();
        for k in 0..5 {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..3 {
                acc += psi.columns()[(i, k)].conj() * f[i];
            }
            assert!((acc - c[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn synthesis_examples() {
        let e1 = synthesis(&FamilyMatrix::identity(3), &real_vector(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(e1, real_vector(&[1.0, 0.0, 0.0]));
        let v = synthesis(&inverse_k(3), &real_vector(&[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(v, real_vector(&[1.0, 0.5, 1.0 / 3.0]));
    }

    #[test]
    fn adjoint_relation() {
        let psi = random_family(4, 6, 3);
        let f = random_family(4, 1, 4).column(0);
        let c = random_family(6, 1, 5).column(0);
        let lhs = synthesis(&psi, &c).unwrap().dotc(&f);
        let rhs = c.dotc(&analysis(&psi, &f).unwrap());
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn dimension_mismatch() {
        let psi = FamilyMatrix::identity(3);
        assert!(matches!(analysis(&psi, &real_vector(&[1.0])), Err(FrameError::DimMismatch { .. })));
        assert!(matches!(synthesis(&psi, &real_vector(&[1.0])), Err(FrameError::DimMismatch { .. })));
    }

    #[test]
    fn frame_operator_examples() {
        let s = frame_operator(&inverse_k(4));
        let want = CMatrix::from_diagonal(&real_vector(&[1.0, 0.25, 1.0 / 9.0, 1.0 / 16.0]));
        assert!(max_norm(&(s.as_matrix() - want)) < 1e-15);
        assert_eq!(frame_operator(&FamilyMatrix::identity(5)).as_matrix(), &CMatrix::identity(5, 5));

        let psi = random_family(5, 9, 6);
        let s = frame_operator(&psi);
        let mut acc = CMatrix::zeros(5, 5);
        for k in 0..9 {
            let v = psi.column(k);
            acc += &v * v.adjoint();
        }
        assert!(max_norm(&(s.as_matrix() - acc)) <= 1e-12);
    }

    #[test]
    fn diagnostics_examples() {
        let d = diagnostics(&inverse_k(4), RankTolerance::default()).unwrap();
        assert!((d.lower_bound - 1.0 / 16.0).abs() < 1e-15);
        assert!((d.upper_bound - 1.0).abs() < 1e-15);
        assert!(d.total);

        let d = diagnostics(&FamilyMatrix::identity(6), RankTolerance::default()).unwrap();
        assert_eq!((d.lower_bound, d.upper_bound), (1.0, 1.0));
        assert!(d.is_tight(0.0));

        let twice_e1 = FamilyMatrix::new(CMatrix::from_fn(2, 2, |i, _| C64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0)), "e1e1").unwrap();
        let d = diagnostics(&twice_e1, RankTolerance::default()).unwrap();
        assert_eq!(d.lower_bound, 0.0);
        assert!((d.upper_bound - 2.0).abs() < 1e-15);
        assert!(!d.total);
        assert!(d.condition.is_infinite());
    }

    #[test]
    fn sweep_verdicts_for_diagonal_pairs() {
        let dims = TruncationSweep::default();
        let upper = FamilyGenerator::DiagonalWeights(DiagonalWeights::new(WeightRule::Power(-1.0)));
        let v = classify_sweep(&upper, &dims).unwrap();
        assert_eq!(v.verdict, Verdict::UpperSemiFrame);
        assert!((v.lower_exponent.unwrap() + 2.0).abs() < 1e-9);
        assert!(v.upper_exponent.unwrap().abs() < 1e-12);

        let lower = FamilyGenerator::DiagonalWeights(DiagonalWeights::new(WeightRule::Power(1.0)));
        let v = classify_sweep(&lower, &dims).unwrap();
        assert_eq!(v.verdict, Verdict::LowerSemiFrame);
        assert!((v.upper_exponent.unwrap() - 2.0).abs() < 1e-9);

        let ones = FamilyGenerator::DiagonalWeights(DiagonalWeights::new(WeightRule::Constant(1.0)));
        assert_eq!(classify_sweep(&ones, &dims).unwrap().verdict, Verdict::Frame);
    }

    #[test]
    fn sweep_needs_three_dims() {
        let g = FamilyGenerator::DiagonalWeights(DiagonalWeights::new(WeightRule::Constant(1.0)));
        assert!(classify_sweep(&g, &TruncationSweep::new(vec![2, 4]).unwrap()).is_err());
    }

    #[test]
    fn non_total_truncations_block_positive_verdicts() {
        let point = |dim, total| SweepPoint { dim, lower_bound: if total { 1.0 } else { 0.0 }, upper_bound: 1.0, rank: dim, total };
        let some = classify_points(vec![point(4, true), point(8, false), point(16, true)], ClassifyThresholds::default());
        assert_eq!(some.verdict, Verdict::Inconclusive);
        let none = classify_points(vec![point(4, false), point(8, false), point(16, false)], ClassifyThresholds::default());
        assert_eq!(none.verdict, Verdict::Neither);
    }

    #[test]
    fn both_bounds_diverging_is_neither() {
        let pts = [4usize, 8, 16]
            .iter()
            .map(|&d| SweepPoint { dim: d, lower_bound: 1.0 / (d * d) as f64, upper_bound: (d * d) as f64, rank: d, total: true })
            .collect();
        assert_eq!(classify_points(pts, ClassifyThresholds::default()).verdict, Verdict::Neither);
    }
}
