//! Multiplier model `ψ_l = √s(l) e_l`: the symbol decides the class.
//!
//! cargo run --example multiplier_classification

use framekit::frame_ops::classify_sweep;
use framekit::generators::{MultiplierModel, WeightRule};
use framekit::{FamilyGenerator, TruncationSweep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> framekit::Result<()> {
    let dims = TruncationSweep::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bounded: Vec<f64> = (0..256).map(|_| rng.random_range(0.5..=2.0)).collect();
    let symbols = [
        ("(l+1)^2", WeightRule::Power(2.0)),
        ("(l+1)^-2", WeightRule::Power(-2.0)),
        ("random in [0.5, 2]", WeightRule::List(bounded)),
    ];
    for (name, rule) in symbols {
        let g = FamilyGenerator::MultiplierModel(MultiplierModel::new(rule));
        let sweep = classify_sweep(&g, &dims)?;
        let last = sweep.points.last().expect("nonempty sweep");
        println!(
            "s(l) = {name:<20} m({}) = {:.3e}, M({}) = {:.3e}  =>  {:?}",
            last.dim, last.lower_bound, last.dim, last.upper_bound, sweep.verdict
        );
    }
    Ok(())
}
