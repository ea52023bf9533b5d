//! A lower semi-frame `φ_k = k e_k` and its dual upper semi-frame.
//!
//! cargo run --example lower_upper_duality

use framekit::dual_recon::{dual_bound_check, dual_from_lower};
use framekit::frame_ops::diagnostics;
use framekit::{FamilyMatrix, RankTolerance};

fn main() -> framekit::Result<()> {
    let tol = RankTolerance::default();
    for d in [4, 16, 64] {
        let w: Vec<f64> = (1..=d).map(|k| k as f64).collect();
        let phi = FamilyMatrix::from_real_diagonal(&w, "k e_k")?;
        let psi = dual_from_lower(&phi, tol)?;
        let dp = diagnostics(&phi, tol)?;
        let ds = diagnostics(&psi, tol)?;
        let b = dual_bound_check(&psi, &phi)?;
        println!(
            "d={d:>3}: Φ bounds [{:.3}, {:.3e}], dual Ψ bounds [{:.3e}, {:.3}], ψ_{d} = {:.4} e_{d}",
            dp.lower_bound,
            dp.upper_bound,
            ds.lower_bound,
            ds.upper_bound,
            psi.columns()[(d - 1, d - 1)].re
        );
        println!(
            "        λ_min(S_Φ) = {:.3} >= 1/M(Ψ) = {:.3}: {}, duality residual {:.1e}",
            b.lower_bound_phi, b.required, b.holds, b.duality_residual
        );
    }

    // a family that is not total cannot be a lower semi-frame
    let gap = FamilyMatrix::new(framekit::CMatrix::identity(3, 2), "two of three axes")?;
    match dual_from_lower(&gap, tol) {
        Err(e) => println!("\n{}: {e}", gap.label()),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
