use framekit::dual_recon::{canonical_dual, reconstruct_frame};
use framekit::frame_ops::{analysis, classify_sweep, diagnostics, frame_operator, synthesis, Verdict};
use framekit::fusion::{fusion_analysis, fusion_diagnostics, SubspaceFamily};
use framekit::generators::{DiagonalWeights, WeightRule};
use framekit::spectral::{max_norm, pseudo_inverse};
use framekit::{CMatrix, FamilyGenerator, FamilyMatrix, HVector, HermitianMatrix, RankTolerance, TruncationSweep, C64};
use proptest::prelude::*;

const TOL: RankTolerance = RankTolerance::DEFAULT;

fn complex_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = CMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), r * c)
            .prop_map(move |v| CMatrix::from_iterator(r, c, v.into_iter().map(|(re, im)| C64::new(re, im))))
    })
}

/// A `d x N` family with `N >= d` together with a vector of length `d`.
fn family_and_vector() -> impl Strategy<Value = (CMatrix, HVector)> {
    (1usize..=6).prop_flat_map(|d| {
        let cols = d..=d + 6;
        let entries = cols.prop_flat_map(move |n| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * n)
                .prop_map(move |v| CMatrix::from_iterator(d, n, v.into_iter().map(|(re, im)| C64::new(re, im))))
        });
        let f = prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
            .prop_map(move |v| HVector::from_iterator(d, v.into_iter().map(|(re, im)| C64::new(re, im))));
        (entries, f)
    })
}

fn family(m: CMatrix) -> Option<FamilyMatrix> {
    FamilyMatrix::new(m, "p").ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn frame_bounds_sandwich_the_quadratic_form((m, f) in family_and_vector()) {
        let Some(psi) = family(m) else { return Ok(()) };
        let d = diagnostics(&psi, TOL).unwrap();
        let q = analysis(&psi, &f).unwrap().norm_squared();
        let n2 = f.norm_squared();
        prop_assert!(q <= d.upper_bound * n2 * (1.0 + 1e-10) + 1e-14);
        prop_assert!(q >= d.lower_bound * n2 * (1.0 - 1e-10) - 1e-14);
    }

    #[test]
    fn frame_operator_is_synthesis_after_analysis((m, f) in family_and_vector()) {
        let Some(psi) = family(m) else { return Ok(()) };
        let via_ops = synthesis(&psi, &analysis(&psi, &f).unwrap()).unwrap();
        let direct = frame_operator(&psi).as_matrix() * &f;
        prop_assert!((via_ops - direct).norm() <= 1e-12 * (1.0 + f.norm()));
    }

    #[test]
    fn canonical_dual_of_dual_is_original((m, _f) in family_and_vector()) {
        let Some(psi) = family(m) else { return Ok(()) };
        let diag = diagnostics(&psi, TOL).unwrap();
        prop_assume!(diag.total && diag.condition < 1e6);
        let dd = canonical_dual(&canonical_dual(&psi, TOL).unwrap().family, TOL).unwrap().family;
        prop_assert!(max_norm(&(dd.columns() - psi.columns())) <= 1e-8);
    }

    #[test]
    fn total_families_reconstruct((m, f) in family_and_vector()) {
        let Some(psi) = family(m) else { return Ok(()) };
        let diag = diagnostics(&psi, TOL).unwrap();
        prop_assume!(diag.total && diag.condition < 1e6);
        let r = reconstruct_frame(&psi, &f, TOL).unwrap();
        prop_assert!(!r.dual_synthesis.projected);
        prop_assert!(r.dual_synthesis.residual <= 1e-8 && r.dual_analysis.residual <= 1e-8);
    }

    #[test]
    fn eigendecomposition_recomposes(m in complex_matrix(7, 7)) {
        let n = m.nrows().min(m.ncols());
        let square = m.view((0, 0), (n, n)).into_owned();
        let h = HermitianMatrix::new(square).unwrap();
        let e = h.eig().unwrap();
        let u = &e.eigenvectors;
        prop_assert!(max_norm(&(u.adjoint() * u - CMatrix::identity(n, n))) <= 1e-12);
        prop_assert!(max_norm(&(e.recompose() - h.as_matrix())) <= 1e-12);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pseudo_inverse_matches_svd(m in complex_matrix(6, 6)) {
        // oracle: nalgebra's SVD-based pseudo-inverse
        let svd = m.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.iter().copied().filter(|s| *s > 1e-6 * smax).fold(f64::INFINITY, f64::min);
        // stay away from the cutoff so both routes keep the same rank
        prop_assume!(svd.singular_values.iter().all(|s| *s > 1e-3 * smax || *s < 1e-9 * smax));
        let oracle = svd.pseudo_inverse(1e-7 * smax).unwrap();
        let ours = pseudo_inverse(&m, TOL).unwrap();
        prop_assert!(max_norm(&(ours - oracle)) <= 1e-9 / (smin * smin).min(1.0));
    }

    #[test]
    fn power_weights_classify_by_sign(p in prop_oneof![-3.0f64..-0.6, -0.04f64..0.04, 0.6f64..3.0]) {
        let g = FamilyGenerator::DiagonalWeights(DiagonalWeights::new(WeightRule::Power(p)));
        let dims = TruncationSweep::new(vec![8, 16, 32, 64]).unwrap();
        let verdict = classify_sweep(&g, &dims).unwrap().verdict;
        let expect = if p < -0.5 { Verdict::UpperSemiFrame } else if p > 0.5 { Verdict::LowerSemiFrame } else { Verdict::Frame };
        prop_assert_eq!(verdict, expect);
    }

    #[test]
    fn fusion_bounds_sandwich(
        sets in prop::collection::vec(complex_matrix(4, 3), 1..4),
        weights in prop::collection::vec(0.1f64..3.0, 4),
        fv in prop::collection::vec(-1.0f64..1.0, 4),
    ) {
        let d = sets[0].nrows();
        let sets: Vec<CMatrix> = sets.into_iter().filter(|s| s.nrows() == d).collect();
        let w = weights[..sets.len()].to_vec();
        let Ok(fam) = SubspaceFamily::new(sets, w) else { return Ok(()) };
        let f = HVector::from_iterator(d, fv[..d].iter().map(|&x| C64::new(x, 0.0)));
        let q: f64 = fusion_analysis(&fam, &f).unwrap().iter().map(|c| c.norm_squared()).sum();
        let diag = fusion_diagnostics(&fam, TOL).unwrap();
        let n2 = f.norm_squared();
        prop_assert!(q <= diag.upper_bound * n2 * (1.0 + 1e-10) + 1e-14);
        prop_assert!(q >= diag.lower_bound * n2 * (1.0 - 1e-10) - 1e-14);
    }
}
