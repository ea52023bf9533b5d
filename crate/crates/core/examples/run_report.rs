//! Builds a run configuration in code and prints the JSON report envelope,
//! the same output the `framekit` binary produces.
//!
//! cargo run --example run_report

use framekit::cli::{generator_from_flags, parse_dims, run, Command, RunConfig};

fn main() -> framekit::Result<()> {
    let mut cfg = RunConfig::new(Command::Triplet);
    cfg.generator = Some(generator_from_flags("diag", Some("pow:-1"), None)?);
    cfg.dims = Some(parse_dims("8,16,32")?);
    cfg.coefficient = 3;
    let out = run(cfg)?;
    println!("{}", out.envelope.to_json()?);
    for (name, text) in &out.csv {
        println!("--- {name}\n{text}");
    }
    Ok(())
}
