//! Norms of coefficient vectors in the triplet `H_Ψ ⊂ H₀ ⊂ H_Ψ^×` for `ψ_k = e_k / k`.
//!
//! cargo run --example hilbert_triplet

use framekit::dual_recon::{gram_operators, triplet_report};
use framekit::{FamilyMatrix, HVector, RankTolerance, C64};

fn main() -> framekit::Result<()> {
    let tol = RankTolerance::default();
    let d = 10;
    let w: Vec<f64> = (1..=d).map(|k| 1.0 / k as f64).collect();
    let psi = FamilyMatrix::from_real_diagonal(&w, "1/k")?;
    let g = gram_operators(&psi, tol)?;
    println!("{:>3}  {:>10}  {:>10}  {:>10}", "p", "‖e_p‖_Ψ", "‖e_p‖₀", "‖e_p‖_Ψ^×");
    for p in 1..=d {
        let mut c = HVector::zeros(d);
        c[p - 1] = C64::new(1.0, 0.0);
        let t = triplet_report(&psi, &c, &psi.column(p - 1), &g, tol)?;
        println!("{p:>3}  {:>10.6}  {:>10.6}  {:>10.6}", t.norm_psi, t.norm_zero, t.norm_psi_cross);
    }

    // a vector decaying like 1/k is small in H_Ψ^× but large in H_Ψ
    let c = HVector::from_iterator(d, (1..=d).map(|k| C64::new(1.0 / k as f64, 0.0)));
    let t = triplet_report(&psi, &c, &(psi.columns() * &c), &g, tol)?;
    println!("\nc_k = 1/k: ‖c‖_Ψ = {:.4}, ‖c‖₀ = {:.4}, ‖c‖_Ψ^× = {:.4}", t.norm_psi, t.norm_zero, t.norm_psi_cross);
    Ok(())
}
