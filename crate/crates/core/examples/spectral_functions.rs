//! Hermitian eigendecomposition, spectral functions and the rank cutoff.
//!
//! cargo run --example spectral_functions

use framekit::spectral::{max_norm, pseudo_inverse, SpectralFunction};
use framekit::{CMatrix, HermitianMatrix, RankTolerance, C64};

fn main() -> framekit::Result<()> {
    let a = CMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(4.0, 0.0),
            C64::new(1.0, 1.0),
            C64::new(0.0, 0.0),
            C64::new(1.0, -1.0),
            C64::new(3.0, 0.0),
            C64::new(0.0, 0.5),
            C64::new(0.0, 0.0),
            C64::new(0.0, -0.5),
            C64::new(1.0, 0.0),
        ],
    );
    let h = HermitianMatrix::new(a)?;
    let tol = RankTolerance::default();
    let e = h.eig()?;
    println!("eigenvalues {:.6?}", e.eigenvalues);

    let root = e.map(SpectralFunction::Sqrt, tol)?;
    let sq = root.as_matrix() * root.as_matrix();
    println!("‖(A^1/2)² - A‖_max = {:.2e}", max_norm(&(sq - h.as_matrix())));

    let inv = e.map(SpectralFunction::Inverse, tol)?;
    println!("‖A⁻¹A - I‖_max = {:.2e}", max_norm(&(inv.as_matrix() * h.as_matrix() - CMatrix::identity(3, 3))));

    let log = |x: f64| x.ln();
    let l = e.map(SpectralFunction::Custom { f: &log, inverse_type: false }, tol)?;
    println!("tr log A = {:.6}, log det A = {:.6}", l.as_matrix().trace().re, e.eigenvalues.iter().map(|x| x.ln()).sum::<f64>());

    // the cutoff: eigenvalues below 1e-12 · max are treated as zero
    let tiny = HermitianMatrix::from_real_diagonal(&[1.0, 1e-9, 1e-14])?;
    for cutoff in [1e-12, 1e-6] {
        let t = RankTolerance::new(cutoff)?;
        let e = tiny.eig()?;
        let inv = e.map(SpectralFunction::Inverse, t)?;
        let diag: Vec<String> = inv.as_matrix().diagonal().iter().map(|z| format!("{:.1e}", z.re)).collect();
        println!("cutoff {cutoff:.0e}: rank {}, diag of inverse [{}]", e.rank(t), diag.join(", "));
    }

    let m = CMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0].map(|x| C64::new(x, 0.0)));
    let p = pseudo_inverse(&m, tol)?;
    println!("rank-one 2x3 matrix: ‖M M⁺ M - M‖_max = {:.2e}", max_norm(&(&m * &p * &m - &m)));
    Ok(())
}
