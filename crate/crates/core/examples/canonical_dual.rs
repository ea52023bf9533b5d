//! Canonical dual `S⁻¹ψ_k` of a random frame, checked against direct solves.
//!
//! cargo run --example canonical_dual

use framekit::dual_recon::{canonical_dual, duality_residual, reconstruct_frame};
use framekit::frame_ops::{diagnostics, frame_operator};
use framekit::{CMatrix, FamilyMatrix, RankTolerance, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> framekit::Result<()> {
    let tol = RankTolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let m = CMatrix::from_fn(4, 7, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let psi = FamilyMatrix::new(m, "random 4x7")?;

    let d = diagnostics(&psi, tol)?;
    println!("{}: m = {:.4}, M = {:.4}, condition {:.2}", psi.label(), d.lower_bound, d.upper_bound, d.condition);

    let dual = canonical_dual(&psi, tol)?.family;
    let lu = frame_operator(&psi).into_matrix().lu();
    let mut worst: f64 = 0.0;
    for k in 0..psi.count() {
        let x = lu.solve(&psi.column(k)).expect("S is invertible");
        worst = worst.max((dual.column(k) - x).norm());
    }
    println!("max |S⁻¹ψ_k - LU solve| = {worst:.2e}");
    println!("‖D_Ψ C_dual - I‖_max = {:.2e}", duality_residual(&psi, &dual)?);

    let f = psi.column(0) * C64::new(0.5, -1.0) + psi.column(3);
    let r = reconstruct_frame(&psi, &f, tol)?;
    println!(
        "reconstruction residuals: Σ⟨ψ_k,f⟩S⁻¹ψ_k {:.2e}, Σ⟨S⁻¹ψ_k,f⟩ψ_k {:.2e}",
        r.dual_synthesis.residual, r.dual_analysis.residual
    );
    Ok(())
}
