use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use framekit::cli::{self, Command, DualMethod, RunConfig, SubspaceInput};
use framekit::FrameError;

#[derive(Parser)]
#[command(name = "framekit", version, about = "Frame, semi-frame and fusion-frame diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Frame bounds per truncation and a frame / semi-frame verdict.
    Classify(Common),
    /// Canonical dual, or the upper semi-frame dual of a lower semi-frame.
    Dual {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Method::Canonical)]
        method: Method,
    },
    /// Residuals of the four reconstruction formulas plus regularity.
    Reconstruct(Common),
    /// Norms of e_p in the triplet of coefficient spaces, per truncation.
    Triplet {
        #[command(flatten)]
        common: Common,
        /// 1-based coefficient index p.
        #[arg(long, default_value_t = 1)]
        coefficient: usize,
    },
    /// Bounds, dual and reconstruction for a frame of subspaces.
    Fusion {
        #[command(flatten)]
        common: Common,
        /// CSV spanning set of one subspace (repeat per subspace).
        #[arg(long = "subspace")]
        subspaces: Vec<PathBuf>,
        /// Comma-separated subspace weights.
        #[arg(long)]
        fusion_weights: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Canonical,
    Lower,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Family matrix CSV (columns are the family vectors).
    #[arg(long, conflicts_with = "generator")]
    family: Option<PathBuf>,
    /// diag | multiplier | affine
    #[arg(long)]
    generator: Option<String>,
    /// Weight rule for `diag`, e.g. pow:-1, const:2, values:1,2,3, list:path.
    #[arg(long)]
    weights: Option<String>,
    /// Symbol rule for `multiplier`.
    #[arg(long)]
    symbol: Option<String>,
    /// Truncation sweep, e.g. 8,16,32,64.
    #[arg(long)]
    dims: Option<String>,
    /// Single truncation dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Relative rank cutoff (default 1e-12, or FRAMEKIT_TOL).
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the random test vector.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated real test vector.
    #[arg(long)]
    vector: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn build(common: Common, command: Command) -> Result<RunConfig, FrameError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::new(command),
    };
    if cfg.command.is_some_and(|c| c != command) {
        return Err(FrameError::InvalidInput("config file is for a different command".into()));
    }
    cfg.command = Some(command);
    if let Some(p) = common.family {
        cfg.family = Some(p);
    }
    if let Some(kind) = &common.generator {
        cfg.generator = Some(cli::generator_from_flags(kind, common.weights.as_deref(), common.symbol.as_deref())?);
    }
    if let Some(d) = &common.dims {
        cfg.dims = Some(cli::parse_dims(d)?);
    }
    cfg.dim = common.dim.or(cfg.dim);
    cfg.rank_cutoff = common.tol.or(cfg.rank_cutoff);
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    if let Some(v) = &common.vector {
        cfg.vector = Some(cli::parse_floats(v)?);
    }
    if common.out_dir.is_some() {
        cfg.out_dir = common.out_dir;
    }
    Ok(cfg)
}

fn config(sub: Sub) -> Result<RunConfig, FrameError> {
    match sub {
        Sub::Classify(c) => build(c, Command::Classify),
        Sub::Reconstruct(c) => build(c, Command::Reconstruct),
        Sub::Dual { common, method } => {
            let mut cfg = build(common, Command::Dual)?;
            cfg.dual_method = match method {
                Method::Canonical => DualMethod::Canonical,
                Method::Lower => DualMethod::Lower,
            };
            Ok(cfg)
        }
        Sub::Triplet { common, coefficient } => {
            let mut cfg = build(common, Command::Triplet)?;
            cfg.coefficient = coefficient;
            Ok(cfg)
        }
        Sub::Fusion { common, subspaces, fusion_weights } => {
            let mut cfg = build(common, Command::Fusion)?;
            if !subspaces.is_empty() {
                let weights = match fusion_weights {
                    Some(w) => cli::parse_floats(&w)?,
                    None => vec![1.0; subspaces.len()],
                };
                cfg.subspaces = Some(SubspaceInput { blocks: subspaces, weights });
            }
            Ok(cfg)
        }
    }
}

fn main() -> ExitCode {
    let args = Cli::parse();
    let result = config(args.command).and_then(cli::run).and_then(|out| {
        out.write()?;
        let json = out.envelope.to_json()?;
        // a closed pipe (e.g. `| head`) is not an error
        let _ = writeln!(std::io::stdout(), "{json}");
        Ok(out.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("framekit: {e}");
            ExitCode::from(cli::error_exit_code(&e))
        }
    }
}
