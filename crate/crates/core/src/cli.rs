//! Run configuration, report envelopes and the command implementations
//! behind the `framekit` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dual_recon::{
    canonical_dual, dual_bound_check, dual_from_lower, duality_residual, gram_operators, reconstruct_frame,
    reconstruct_full, reconstruct_rd, regularity, triplet_report, DualBoundReport, RegularityReport,
};
use crate::error::{FrameError, Result};
use crate::family::{FamilyGenerator, FamilyMatrix, TruncationSweep};
use crate::frame_ops::{classify_points, classify_sweep_with, diagnostics, ClassifyThresholds, FrameDiagnostics, SweepPoint, SweepVerdict};
use crate::fusion::{fusion_dual, fusion_report, FusionReport, SubspaceFamily};
use crate::generators::{AffineCsConfig, DiagonalWeights, MultiplierModel, WeightRule};
use crate::report::{format_f64, matrix_to_csv, read_matrix_csv, to_json_string};
use crate::spectral::{HVector, RankTolerance, C64};

pub const SCHEMA: &str = "framekit/1";
pub const TOL_ENV: &str = "FRAMEKIT_TOL";

/// Residuals above this make a run a numerical failure (exit code 3).
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Classify,
    Dual,
    Reconstruct,
    Triplet,
    Fusion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualMethod {
    /// `S⁻¹ψ_k`.
    #[default]
    Canonical,
    /// Columns of `C_Φ⁺` for a lower semi-frame `Φ`.
    Lower,
}

/// Subspaces given as CSV spanning sets, one weight each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceInput {
    pub blocks: Vec<PathBuf>,
    pub weights: Vec<f64>,
}

fn default_schema() -> String {
    SCHEMA.to_string()
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Json, OutputFormat::Csv]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<FamilyGenerator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspaces: Option<SubspaceInput>,
    /// Truncation sweep for `classify` and `triplet`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<TruncationSweep>,
    /// Single truncation for `dual` and `reconstruct` with a generator.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_cutoff: Option<f64>,
    #[serde(default)]
    pub thresholds: ClassifyThresholds,
    #[serde(default)]
    pub dual_method: DualMethod,
    /// Real test vector for `reconstruct` and `fusion`; random when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    /// 1-based index `p` of the coefficient vector `e_p` for `triplet`.
    #[serde(default = "one")]
    pub coefficient: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn one() -> usize {
    1
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            schema: default_schema(),
            command: Some(command),
            family: None,
            generator: None,
            subspaces: None,
            dims: None,
            dim: None,
            rank_cutoff: None,
            thresholds: ClassifyThresholds::default(),
            dual_method: DualMethod::default(),
            vector: None,
            seed: 0,
            coefficient: 1,
            out_dir: None,
            formats: default_formats(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| FrameError::Parse(format!("config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn command(&self) -> Result<Command> {
        self.command.ok_or_else(|| FrameError::InvalidInput("no command given".into()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(FrameError::InvalidInput(format!("unsupported schema `{}`, expected `{SCHEMA}`", self.schema)));
        }
        let command = self.command()?;
        let sources = [self.family.is_some(), self.generator.is_some(), self.subspaces.is_some()];
        if sources.iter().filter(|s| **s).count() != 1 {
            return Err(FrameError::InvalidInput("exactly one input source (family, generator or subspaces) is required".into()));
        }
        if (command == Command::Fusion) != self.subspaces.is_some() {
            return Err(FrameError::InvalidInput("subspaces are the input of `fusion` and only of `fusion`".into()));
        }
        if let Some(c) = self.rank_cutoff {
            RankTolerance::new(c)?;
        }
        if self.coefficient == 0 {
            return Err(FrameError::InvalidInput("coefficient index is 1-based".into()));
        }
        Ok(())
    }

    /// Explicit cutoff, else `FRAMEKIT_TOL`, else the default.
    pub fn tolerance(&self) -> Result<RankTolerance> {
        if let Some(c) = self.rank_cutoff {
            return RankTolerance::new(c);
        }
        match std::env::var(TOL_ENV) {
            Ok(v) => {
                let c = v.trim().parse::<f64>().map_err(|_| FrameError::InvalidInput(format!("{TOL_ENV}=`{v}` is not a number")))?;
                RankTolerance::new(c)
            }
            Err(_) => Ok(RankTolerance::default()),
        }
    }

    fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

/// Builds a generator from command-line style arguments.
pub fn generator_from_flags(kind: &str, weights: Option<&str>, symbol: Option<&str>) -> Result<FamilyGenerator> {
    let rule = |spec: Option<&str>, name: &str| -> Result<WeightRule> {
        WeightRule::parse(spec.ok_or_else(|| FrameError::InvalidInput(format!("generator `{kind}` needs --{name}")))?)
    };
    match kind {
        "diag" | "diagonal" | "diagonal_weights" => Ok(FamilyGenerator::DiagonalWeights(DiagonalWeights::new(rule(weights, "weights")?))),
        "multiplier" | "multiplier_model" => Ok(FamilyGenerator::MultiplierModel(MultiplierModel::new(rule(symbol, "symbol")?))),
        "affine" | "affine_cs" => Ok(FamilyGenerator::AffineCs(AffineCsConfig::default())),
        other => Err(FrameError::InvalidInput(format!("unknown generator `{other}`"))),
    }
}

/// Parses `8,16,32`.
pub fn parse_dims(text: &str) -> Result<TruncationSweep> {
    let dims = text
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| FrameError::InvalidInput(format!("bad dimension `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    TruncationSweep::new(dims)
}

/// Parses `1,0.5,2`.
pub fn parse_floats(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| FrameError::InvalidInput(format!("bad number `{t}`"))))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassifyReport {
    pub points: Vec<SweepPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepVerdict>,
    /// Diagnostics of a single supplied family.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<FrameDiagnostics>,
    pub verdict: crate::frame_ops::Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualReport {
    pub method: DualMethod,
    pub dim: usize,
    pub count: usize,
    pub diagnostics: FrameDiagnostics,
    pub dual_diagnostics: FrameDiagnostics,
    /// `‖D_Ψ C_Φ − I‖_max` for the (upper, lower) pair.
    pub duality_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<DualBoundReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionResiduals {
    pub srepr: f64,
    pub srepr2: f64,
    pub rd_formula: f64,
    pub full_formula: f64,
    pub projected: bool,
    pub regularity: RegularityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripletRow {
    pub dim: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub norm_psi: f64,
    pub norm_zero: f64,
    pub norm_psi_cross: f64,
    pub norm_s_frak: f64,
    pub coefficients_in_range: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TripletSeries {
    pub coefficient: usize,
    pub rows: Vec<TripletRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Report {
    Classify(ClassifyReport),
    Dual(DualReport),
    Reconstruct(ReconstructionResiduals),
    Triplet(TripletSeries),
    Fusion(FusionReport),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub schema: String,
    pub tool_version: String,
    pub config: RunConfig,
    pub timing_ms: f64,
    pub report: Report,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> Result<String> {
        to_json_string(self)
    }
}

/// A finished run: the envelope, the CSV files to write, and whether every
/// residual stayed below [`RESIDUAL_TOLERANCE`].
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub envelope: ReportEnvelope,
    pub csv: Vec<(String, String)>,
    pub numerically_ok: bool,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.numerically_ok {
            EXIT_OK
        } else {
            EXIT_NUMERICAL
        }
    }

    /// Writes `report.json` and the CSV outputs selected by `formats` into `out_dir`.
    pub fn write(&self) -> Result<Vec<PathBuf>> {
        let cfg = &self.envelope.config;
        let Some(dir) = &cfg.out_dir else {
            return Ok(Vec::new());
        };
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if cfg.wants(OutputFormat::Json) {
            let p = dir.join("report.json");
            std::fs::write(&p, self.envelope.to_json()?)?;
            written.push(p);
        }
        if cfg.wants(OutputFormat::Csv) {
            for (name, text) in &self.csv {
                let p = dir.join(name);
                std::fs::write(&p, text)?;
                written.push(p);
            }
        }
        Ok(written)
    }
}

pub fn error_exit_code(e: &FrameError) -> u8 {
    match e {
        FrameError::SingularOperator(_) | FrameError::NotConverged { .. } => EXIT_NUMERICAL,
        _ => EXIT_INVALID_INPUT,
    }
}

pub fn run(config: RunConfig) -> Result<RunOutcome> {
    config.validate()?;
    let start = Instant::now();
    let (report, csv, ok) = match config.command()? {
        Command::Classify => cmd_classify(&config)?,
        Command::Dual => cmd_dual(&config)?,
        Command::Reconstruct => cmd_reconstruct(&config)?,
        Command::Triplet => cmd_triplet(&config)?,
        Command::Fusion => cmd_fusion(&config)?,
    };
    let envelope = ReportEnvelope {
        schema: SCHEMA.to_string(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
        report,
    };
    Ok(RunOutcome { envelope, csv, numerically_ok: ok })
}

type CommandOutput = (Report, Vec<(String, String)>, bool);

fn load_family(path: &Path) -> Result<FamilyMatrix> {
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    FamilyMatrix::new(read_matrix_csv(path)?, label)
}

/// The single family a command works on: the file, or the generator at `dim`.
fn single_family(cfg: &RunConfig) -> Result<FamilyMatrix> {
    match (&cfg.family, &cfg.generator) {
        (Some(p), _) => load_family(p),
        (None, Some(g)) => {
            let d = cfg
                .dim
                .or_else(|| cfg.dims.as_ref().and_then(|s| s.dims().last().copied()))
                .ok_or_else(|| FrameError::InvalidInput("a generator needs --dim".into()))?;
            g.produce(d)
        }
        _ => Err(FrameError::InvalidInput("no family given".into())),
    }
}

fn test_vector(cfg: &RunConfig, dim: usize) -> Result<HVector> {
    match &cfg.vector {
        Some(v) if v.len() != dim => Err(FrameError::dims(dim, v.len())),
        Some(v) => Ok(HVector::from_iterator(dim, v.iter().map(|&x| C64::new(x, 0.0)))),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            Ok(HVector::from_fn(dim, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
        }
    }
}

fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

fn bounds_csv(points: &[SweepPoint]) -> String {
    csv_table(
        "dim,lower_bound,upper_bound,rank,total",
        points.iter().map(|p| {
            vec![p.dim.to_string(), format_f64(p.lower_bound), format_f64(p.upper_bound), p.rank.to_string(), p.total.to_string()]
        }),
    )
}

pub fn cmd_classify(cfg: &RunConfig) -> Result<CommandOutput> {
    let tol = cfg.tolerance()?;
    let report = match (&cfg.family, &cfg.generator) {
        (None, Some(g)) => {
            let dims = match &cfg.dims {
                Some(d) => d.clone(),
                None => TruncationSweep::default(),
            };
            let sweep = classify_sweep_with(g, &dims, tol, cfg.thresholds)?;
            ClassifyReport { points: sweep.points.clone(), verdict: sweep.verdict, sweep: Some(sweep), diagnostics: None }
        }
        _ => {
            // a finite family is a frame exactly when it is total
            let diag = diagnostics(&single_family(cfg)?, tol)?;
            let point = SweepPoint {
                dim: diag.dim,
                lower_bound: diag.lower_bound,
                upper_bound: diag.upper_bound,
                rank: diag.rank,
                total: diag.total,
            };
            let verdict = if diag.total { crate::frame_ops::Verdict::Frame } else { classify_points(vec![point.clone()], cfg.thresholds).verdict };
            ClassifyReport { points: vec![point], sweep: None, diagnostics: Some(diag), verdict }
        }
    };
    let csv = vec![("bounds.csv".to_string(), bounds_csv(&report.points))];
    Ok((Report::Classify(report), csv, true))
}

pub fn cmd_dual(cfg: &RunConfig) -> Result<CommandOutput> {
    let tol = cfg.tolerance()?;
    let psi = single_family(cfg)?;
    let diag = diagnostics(&psi, tol)?;
    if !diag.total {
        return Err(FrameError::InvalidFamily(format!("family is not total (rank {} < {})", diag.rank, diag.dim)));
    }
    let (dual, residual, bound) = match cfg.dual_method {
        DualMethod::Canonical => {
            let dual = canonical_dual(&psi, tol)?.family;
            let r = duality_residual(&psi, &dual)?;
            (dual, r, None)
        }
        DualMethod::Lower => {
            let dual = dual_from_lower(&psi, tol)?;
            let r = duality_residual(&dual, &psi)?;
            let bound = if r <= RESIDUAL_TOLERANCE { Some(dual_bound_check(&dual, &psi)?) } else { None };
            (dual, r, bound)
        }
    };
    let ok = residual <= RESIDUAL_TOLERANCE && bound.as_ref().is_none_or(|b| b.holds);
    let report = DualReport {
        method: cfg.dual_method,
        dim: psi.dim(),
        count: psi.count(),
        diagnostics: diag,
        dual_diagnostics: diagnostics(&dual, tol)?,
        duality_residual: residual,
        bound,
    };
    let csv = vec![("dual.csv".to_string(), matrix_to_csv(dual.columns()))];
    Ok((Report::Dual(report), csv, ok))
}

pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<CommandOutput> {
    let tol = cfg.tolerance()?;
    let psi = single_family(cfg)?;
    let f = test_vector(cfg, psi.dim())?;
    let g = gram_operators(&psi, tol)?;
    let frame = reconstruct_frame(&psi, &f, tol)?;
    let rd = reconstruct_rd(&psi, &f, &g)?;
    let full = reconstruct_full(&psi, &f, &g, tol)?;
    let report = ReconstructionResiduals {
        srepr: frame.dual_synthesis.residual,
        srepr2: frame.dual_analysis.residual,
        rd_formula: rd.residual,
        full_formula: full.residual,
        projected: frame.dual_synthesis.projected || rd.projected || full.projected,
        regularity: regularity(&psi, tol)?,
    };
    let worst = [report.srepr, report.srepr2, report.rd_formula, report.full_formula].into_iter().fold(0.0, f64::max);
    let ok = report.projected || worst <= RESIDUAL_TOLERANCE;
    let csv = vec![(
        "residuals.csv".to_string(),
        csv_table(
            "formula,residual",
            [("srepr", report.srepr), ("srepr2", report.srepr2), ("rd_formula", report.rd_formula), ("full_formula", report.full_formula)]
                .into_iter()
                .map(|(n, r)| vec![n.to_string(), format_f64(r)]),
        ),
    )];
    Ok((Report::Reconstruct(report), csv, ok))
}

fn triplet_row(psi: &FamilyMatrix, p: usize, tol: RankTolerance) -> Result<TripletRow> {
    if p > psi.count() {
        return Err(FrameError::InvalidInput(format!("coefficient index {p} exceeds family size {}", psi.count())));
    }
    let mut c = HVector::zeros(psi.count());
    c[p - 1] = C64::new(1.0, 0.0);
    // the vector synthesized from e_p, i.e. ψ_p
    let f = psi.column(p - 1);
    let g = gram_operators(psi, tol)?;
    let t = triplet_report(psi, &c, &f, &g, tol)?;
    let d = diagnostics(psi, tol)?;
    Ok(TripletRow {
        dim: psi.dim(),
        lower_bound: d.lower_bound,
        upper_bound: d.upper_bound,
        norm_psi: t.norm_psi,
        norm_zero: t.norm_zero,
        norm_psi_cross: t.norm_psi_cross,
        norm_s_frak: t.norm_s_frak,
        coefficients_in_range: t.coefficients_in_range,
    })
}

pub fn cmd_triplet(cfg: &RunConfig) -> Result<CommandOutput> {
    let tol = cfg.tolerance()?;
    let rows = match (&cfg.family, &cfg.generator, &cfg.dims) {
        (None, Some(g), Some(dims)) => dims.dims().iter().map(|&d| triplet_row(&g.produce(d)?, cfg.coefficient, tol)).collect::<Result<Vec<_>>>()?,
        _ => vec![triplet_row(&single_family(cfg)?, cfg.coefficient, tol)?],
    };
    let csv = csv_table(
        "dim,lower_bound,upper_bound,norm_psi,norm_zero,norm_psi_cross,norm_s_frak",
        rows.iter().map(|r| {
            let mut v = vec![r.dim.to_string()];
            v.extend([r.lower_bound, r.upper_bound, r.norm_psi, r.norm_zero, r.norm_psi_cross, r.norm_s_frak].map(format_f64));
            v
        }),
    );
    let series = TripletSeries { coefficient: cfg.coefficient, rows };
    Ok((Report::Triplet(series), vec![("triplet.csv".to_string(), csv)], true))
}

pub fn load_subspaces(input: &SubspaceInput) -> Result<SubspaceFamily> {
    let sets = input.blocks.iter().map(read_matrix_csv).collect::<Result<Vec<_>>>()?;
    SubspaceFamily::new(sets, input.weights.clone())
}

pub fn cmd_fusion(cfg: &RunConfig) -> Result<CommandOutput> {
    let tol = cfg.tolerance()?;
    let input = cfg.subspaces.as_ref().ok_or_else(|| FrameError::InvalidInput("fusion needs subspaces".into()))?;
    let fam = load_subspaces(input)?;
    let f = test_vector(cfg, fam.dim())?;
    let report = fusion_report(&fam, &f, tol)?;
    let ok = report.duality_residual <= RESIDUAL_TOLERANCE && (report.projected || report.reconstruction_residual <= RESIDUAL_TOLERANCE);
    let dual = fusion_dual(&fam, tol)?;
    let csv = dual.bases().iter().enumerate().map(|(j, b)| (format!("dual_subspace_{j}.csv"), matrix_to_csv(b))).collect();
    Ok((Report::Fusion(report), csv, ok))
}
