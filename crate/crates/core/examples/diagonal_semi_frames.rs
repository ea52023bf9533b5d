//! Bounds of `ψ_k = w_k e_k` across truncations, and the resulting verdicts.
//!
//! cargo run --example diagonal_semi_frames

use framekit::frame_ops::classify_sweep;
use framekit::generators::{DiagonalWeights, WeightRule};
use framekit::{FamilyGenerator, TruncationSweep};

fn main() -> framekit::Result<()> {
    let dims = TruncationSweep::default();
    for rule in ["pow:-1", "pow:1", "const:2", "pow:-0.25"] {
        let g = FamilyGenerator::DiagonalWeights(DiagonalWeights::new(WeightRule::parse(rule)?));
        let sweep = classify_sweep(&g, &dims)?;
        println!("weights {rule}");
        println!("  {:>5}  {:>12}  {:>12}", "d", "m(d)", "M(d)");
        for p in &sweep.points {
            println!("  {:>5}  {:>12.4e}  {:>12.4e}", p.dim, p.lower_bound, p.upper_bound);
        }
        println!(
            "  slopes: log m ~ {:.3} log d, log M ~ {:.3} log d  =>  {:?}\n",
            sweep.lower_exponent.unwrap_or(f64::NAN),
            sweep.upper_exponent.unwrap_or(f64::NAN),
            sweep.verdict
        );
    }
    Ok(())
}
