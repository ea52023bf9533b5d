//! Frames of subspaces: bounds, reconstruction, dual subspaces and bound transfer.
//!
//! cargo run --example fusion_frames

use framekit::fusion::{
    bound_transfer, fusion_diagnostics, fusion_dual, fusion_duality_residual, fusion_reconstruct, principal_angles,
    SubspaceFamily,
};
use framekit::spectral::real_vector;
use framekit::{CMatrix, FamilyMatrix, RankTolerance, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> framekit::Result<()> {
    let tol = RankTolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut random = |r, c| CMatrix::from_fn(r, c, |_, _| C64::new(rng.random_range(-1.0..1.0), 0.0));

    // three planes in R^4 with different weights
    let fam = SubspaceFamily::new(vec![random(4, 2), random(4, 2), random(4, 2)], vec![1.0, 0.5, 2.0])?;
    let d = fusion_diagnostics(&fam, tol)?;
    println!("fusion bounds [{:.4}, {:.4}], total: {}", d.lower_bound, d.upper_bound, d.total);

    let f = real_vector(&[1.0, -1.0, 2.0, 0.5]);
    let r = fusion_reconstruct(&fam, &f, tol)?;
    println!("f = Σ v_j² S⁻¹ π_j f: residual {:.2e}", r.residual);

    let dual = fusion_dual(&fam, tol)?;
    println!("duality residual {:.2e}", fusion_duality_residual(&fam, &dual, tol)?);
    for (j, (a, b)) in fam.bases().iter().zip(dual.bases()).enumerate() {
        let angles = principal_angles(a, b)?;
        println!("  angles between H_{j} and S⁻¹H_{j}: {:.3?}", angles);
    }

    // a family of 9 vectors grouped into three blocks
    let base = FamilyMatrix::new(random(4, 9), "9 vectors")?;
    let t = bound_transfer(&base, &[0..3, 3..6, 6..9], &[1.0, 1.0, 1.0], tol)?;
    println!(
        "\nplain bounds [{:.3}, {:.3}], block bounds [{:.3}, {:.3}]",
        t.plain.lower_bound, t.plain.upper_bound, t.block_lower, t.block_upper
    );
    println!(
        "subspace bounds [{:.3}, {:.3}] within predicted [{:.3}, {:.3}]: {}",
        t.fusion.lower_bound, t.fusion.upper_bound, t.predicted_lower, t.predicted_upper, t.holds
    );
    Ok(())
}
