//! The four reconstruction formulas side by side, plus the regularity check.
//!
//! cargo run --example reconstruction_formulas

use framekit::dual_recon::{gram_operators, reconstruct_frame, reconstruct_full, reconstruct_rd, regularity};
use framekit::spectral::real_vector;
use framekit::{FamilyMatrix, RankTolerance};

fn report(psi: &FamilyMatrix, tol: RankTolerance) -> framekit::Result<()> {
    let f = real_vector(&(0..psi.dim()).map(|i| (i as f64 + 1.0).sin()).collect::<Vec<_>>());
    let g = gram_operators(psi, tol)?;
    let frame = reconstruct_frame(psi, &f, tol)?;
    let rd = reconstruct_rd(psi, &f, &g)?;
    let full = reconstruct_full(psi, &f, &g, tol)?;
    let reg = regularity(psi, tol)?;
    println!("{} (Gram condition {:.2e})", psi.label(), g.condition());
    println!("  dual synthesis  {:.2e}", frame.dual_synthesis.residual);
    println!("  dual analysis   {:.2e}", frame.dual_analysis.residual);
    println!("  D G⁻¹ C         {:.2e}", rd.residual);
    println!("  S^-1/2 D G^-1/2 C {:.2e}", full.residual);
    println!("  regular: {} (worst {:.1e})", reg.regular, reg.worst_residual);
    Ok(())
}

fn main() -> framekit::Result<()> {
    let tol = RankTolerance::default();
    let w: Vec<f64> = (1..=12).map(|k| 1.0 / k as f64).collect();
    report(&FamilyMatrix::from_real_diagonal(&w, "1/k, d=12")?, tol)?;

    // redundant: two copies of a rotated basis
    let c = framekit::CMatrix::from_fn(3, 6, |i, k| {
        let t = 0.3 * (k / 3) as f64;
        let (s, co) = t.sin_cos();
        let j = k % 3;
        let v = match (i, j) {
            (0, 0) | (1, 1) => co,
            (0, 1) => -s,
            (1, 0) => s,
            (2, 2) => 1.0,
            _ => 0.0,
        };
        framekit::C64::new(v, 0.0)
    });
    report(&FamilyMatrix::new(c, "two rotated bases of C^3")?, tol)?;
    Ok(())
}
