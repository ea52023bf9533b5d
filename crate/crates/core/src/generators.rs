//! Generators for the worked model families: diagonal weighted sequences
//! `(m_k e_k)`, Fourier-multiplier models whose frame operator is
//! `diag(s(0), …, s(d-1))`, and quadrature discretizations of the affine
//! coherent states `ψ_x(r) = e^{-ixr} ψ(r)` on `L²(R⁺, r^p dr)`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::family::{make_family, FamilyMatrix};
use crate::spectral::{max_norm, CMatrix, HermitianMatrix, C64};

/// Positive weight sequence indexed from 1.
///
/// Text form: `pow:<p>` (`k^p`), `const:<v>`, `list:<path>` (file of numbers
/// separated by commas or whitespace) or the inline `values:<v1>,<v2>,…`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WeightRule {
    Power(f64),
    Constant(f64),
    List(Vec<f64>),
}

impl WeightRule {
    /// Weight at 1-based index `k`.
    pub fn value(&self, k: usize) -> Result<f64> {
        let v = match self {
            WeightRule::Power(p) => (k as f64).powf(*p),
            WeightRule::Constant(c) => *c,
            WeightRule::List(values) => *values.get(k - 1).ok_or_else(|| {
                FrameError::InvalidInput(format!("weight list has {} entries, index {k} requested", values.len()))
            })?,
        };
        if !(v.is_finite() && v > 0.0) {
            return Err(FrameError::InvalidInput(format!("weight at index {k} must be positive, got {v}")));
        }
        Ok(v)
    }

    /// First `count` weights.
    pub fn values(&self, count: usize) -> Result<Vec<f64>> {
        (1..=count).map(|k| self.value(k)).collect()
    }

    pub fn parse(spec: &str) -> Result<Self> {
        let (head, arg) = spec
            .split_once(':')
            .ok_or_else(|| FrameError::Parse(format!("weight rule `{spec}` must look like kind:argument")))?;
        let number = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| FrameError::Parse(format!("bad number `{s}` in weight rule `{spec}`")))
        };
        match head.trim() {
            "pow" => Ok(WeightRule::Power(number(arg)?)),
            "const" => Ok(WeightRule::Constant(number(arg)?)),
            "values" => Ok(WeightRule::List(parse_number_list(arg)?)),
            "list" => Self::from_list_file(arg.trim()),
            other => Err(FrameError::Parse(format!("unknown weight rule kind `{other}`"))),
        }
    }

    pub fn from_list_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(WeightRule::List(parse_number_list(&text)?))
    }
}

fn parse_number_list(text: &str) -> Result<Vec<f64>> {
    let values = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| FrameError::Parse(format!("bad number `{s}` in list"))))
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(FrameError::Parse("empty number list".into()));
    }
    Ok(values)
}

impl fmt::Display for WeightRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightRule::Power(p) => write!(f, "pow:{p:?}"),
            WeightRule::Constant(c) => write!(f, "const:{c:?}"),
            WeightRule::List(values) => {
                let parts: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
                write!(f, "values:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for WeightRule {
    type Err = FrameError;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl TryFrom<String> for WeightRule {
    type Error = FrameError;

    fn try_from(s: String) -> Result<Self> {
        Self::parse(&s)
    }
}

impl From<WeightRule> for String {
    fn from(w: WeightRule) -> Self {
        w.to_string()
    }
}

/// Columns `m_k e_k`, `k = 1..d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalWeights {
    pub weights: WeightRule,
}

impl DiagonalWeights {
    pub fn new(weights: WeightRule) -> Self {
        Self { weights }
    }
}

pub fn gen_diagonal(w: &DiagonalWeights, d: usize) -> Result<FamilyMatrix> {
    let m = w.weights.values(d)?;
    FamilyMatrix::from_real_diagonal(&m, format!("diagonal[{}] d={d}", w.weights))
}

/// Multiplicity-one multiplier model: the symbol `s(l)` for `l = 0..d-1` is
/// `symbol.value(l + 1)`, so `pow:2` means `s(l) = (l+1)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierModel {
    pub symbol: WeightRule,
}

impl MultiplierModel {
    pub fn new(symbol: WeightRule) -> Self {
        Self { symbol }
    }

    pub fn symbol_values(&self, d: usize) -> Result<Vec<f64>> {
        self.symbol.values(d)
    }
}

/// Columns `√s(l) e_l`; the frame operator is exactly `diag(s)`.
pub fn gen_multiplier(model: &MultiplierModel, d: usize) -> Result<FamilyMatrix> {
    let s = model.symbol_values(d)?;
    let roots: Vec<f64> = s.iter().map(|v| v.sqrt()).collect();
    FamilyMatrix::from_real_diagonal(&roots, format!("multiplier[{}] d={d}", model.symbol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRule {
    Trapezoid,
    #[default]
    Midpoint,
}

/// Nodes and positive weights on an interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(FrameError::InvalidInput("quadrature needs matching, nonempty nodes and weights".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(FrameError::InvalidInput("quadrature weights must be positive".into()));
        }
        if nodes.iter().any(|r| !r.is_finite()) || nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FrameError::InvalidInput("quadrature nodes must be finite and increasing".into()));
        }
        Ok(Self { nodes, weights })
    }

    /// Composite trapezoid rule with `n ≥ 2` nodes including both endpoints.
    pub fn trapezoid(a: f64, b: f64, n: usize) -> Result<Self> {
        check_interval(a, b, n, 2)?;
        let h = (b - a) / (n - 1) as f64;
        let nodes = (0..n).map(|i| a + h * i as f64).collect();
        let weights = (0..n).map(|i| if i == 0 || i == n - 1 { h / 2.0 } else { h }).collect();
        Self::new(nodes, weights)
    }

    /// Composite midpoint rule on `n` equal cells.
    pub fn midpoint(a: f64, b: f64, n: usize) -> Result<Self> {
        check_interval(a, b, n, 1)?;
        let h = (b - a) / n as f64;
        let nodes = (0..n).map(|i| a + h * (i as f64 + 0.5)).collect();
        Self::new(nodes, vec![h; n])
    }

    pub fn build(rule: QuadratureRule, a: f64, b: f64, n: usize) -> Result<Self> {
        match rule {
            QuadratureRule::Trapezoid => Self::trapezoid(a, b, n),
            QuadratureRule::Midpoint => Self::midpoint(a, b, n),
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Typical node spacing.
    pub fn spacing(&self) -> f64 {
        let n = self.nodes.len();
        if n < 2 {
            return self.weights[0];
        }
        (self.nodes[n - 1] - self.nodes[0]) / (n - 1) as f64
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }
}

fn check_interval(a: f64, b: f64, n: usize, min_nodes: usize) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(FrameError::InvalidInput(format!("invalid quadrature interval [{a}, {b}]")));
    }
    if n < min_nodes {
        return Err(FrameError::InvalidInput(format!("quadrature needs at least {min_nodes} nodes, got {n}")));
    }
    Ok(())
}

/// Mother function `ψ`, given through `|ψ(r)|²` up to the admissibility normalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum MotherFunction {
    /// `|ψ(r)|² ∝ r^{1-n} e^{-rate·r}`.
    ExpDecay { rate: f64 },
    /// `|ψ(r)|² ∝ r^{1-n} e^{-(r/width)²}`.
    Gaussian { width: f64 },
}

impl Default for MotherFunction {
    fn default() -> Self {
        MotherFunction::ExpDecay { rate: 1.0 }
    }
}

impl MotherFunction {
    fn unnormalized_sq(&self, r: f64, n: u32) -> f64 {
        let base = r.powf(1.0 - n as f64);
        match self {
            MotherFunction::ExpDecay { rate } => base * (-rate * r).exp(),
            MotherFunction::Gaussian { width } => base * (-(r / width).powi(2)).exp(),
        }
    }

    fn validate(&self) -> Result<()> {
        let p = match self {
            MotherFunction::ExpDecay { rate } => *rate,
            MotherFunction::Gaussian { width } => *width,
        };
        if p.is_finite() && p > 0.0 {
            Ok(())
        } else {
            Err(FrameError::InvalidInput(format!("mother function parameter must be positive, got {p}")))
        }
    }
}

/// Sample points `x_k` of the coherent-state label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "grid", rename_all = "snake_case", deny_unknown_fields)]
pub enum XGrid {
    /// `samples` equispaced points on `[-X, X]`, endpoints included, Riemann
    /// weight `Δx`. `X` defaults to `π / h` for r-node spacing `h`.
    Uniform { samples: usize, half_width: Option<f64> },
    /// Explicit points with a common Riemann weight.
    Points { points: Vec<f64>, weight: f64 },
}

impl Default for XGrid {
    fn default() -> Self {
        XGrid::Uniform { samples: 256, half_width: None }
    }
}

/// Discretized affine coherent states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AffineCsConfig {
    /// Representation index `n ≥ 1`.
    pub n: u32,
    pub mother: MotherFunction,
    /// Upper end of the r-domain; the lower end is `r_max · 1e-4`.
    pub r_max: f64,
    pub r_nodes: usize,
    pub quadrature: QuadratureRule,
    pub x_grid: XGrid,
    /// Exponent `p` of the measure `r^p dr`; defaults to `n - 1`.
    pub measure_power: Option<f64>,
}

impl Default for AffineCsConfig {
    fn default() -> Self {
        Self {
            n: 1,
            mother: MotherFunction::default(),
            r_max: 40.0,
            r_nodes: 512,
            quadrature: QuadratureRule::Midpoint,
            x_grid: XGrid::default(),
            measure_power: None,
        }
    }
}

impl AffineCsConfig {
    pub const R_MIN_FRACTION: f64 = 1e-4;

    pub fn measure_power(&self) -> f64 {
        self.measure_power.unwrap_or(self.n as f64 - 1.0)
    }

    /// Same configuration with the x-grid spacing halved (nested grid).
    pub fn refined(&self) -> Self {
        let x_grid = match &self.x_grid {
            XGrid::Uniform { samples, half_width } => {
                XGrid::Uniform { samples: 2 * samples - 1, half_width: *half_width }
            }
            XGrid::Points { points, weight } => {
                let mut refined = Vec::with_capacity(2 * points.len());
                for w in points.windows(2) {
                    refined.push(w[0]);
                    refined.push(0.5 * (w[0] + w[1]));
                }
                refined.extend(points.last());
                XGrid::Points { points: refined, weight: weight / 2.0 }
            }
        };
        Self { x_grid, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(FrameError::InvalidInput("representation index n must be at least 1".into()));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(FrameError::InvalidInput(format!("r_max must be positive, got {}", self.r_max)));
        }
        if self.r_nodes < 2 {
            return Err(FrameError::InvalidInput(format!("need at least 2 r-nodes, got {}", self.r_nodes)));
        }
        self.mother.validate()
    }
}

/// A generated affine coherent-state family together with its quadrature data.
#[derive(Clone, Debug)]
pub struct AffineCsFamily {
    /// Columns `e^{-i x_k r_i} ψ(r_i) √(w_i μ(r_i))`; analysis is the quadrature of `∫ e^{ixr} ψ̄ f dμ`.
    pub family: FamilyMatrix,
    pub quadrature: Quadrature,
    pub x_points: Vec<f64>,
    /// Riemann weight of one x-sample.
    pub x_weight: f64,
    /// `ψ(r_i)`, real and nonnegative.
    pub mother: Vec<f64>,
    /// `μ(r_i) = r_i^p`.
    pub measure: Vec<f64>,
    /// Multiplication symbol `2π r_i^{n-1} |ψ(r_i)|²`; its maximum is 1.
    pub symbol: Vec<f64>,
    pub n: u32,
}

pub fn gen_affine_cs(cfg: &AffineCsConfig) -> Result<AffineCsFamily> {
    cfg.validate()?;
    let r_min = cfg.r_max * AffineCsConfig::R_MIN_FRACTION;
    let quad = Quadrature::build(cfg.quadrature, r_min, cfg.r_max, cfg.r_nodes)?;
    let n = cfg.n;
    let nf = n as f64;

    let raw: Vec<f64> = quad.nodes().iter().map(|&r| cfg.mother.unnormalized_sq(r, n)).collect();
    if raw.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(FrameError::InvalidInput("mother function is not finite on the quadrature nodes".into()));
    }
    let sup = quad.nodes().iter().zip(&raw).map(|(&r, &p)| 2.0 * PI * r.powf(nf - 1.0) * p).fold(0.0, f64::max);
    if sup <= 0.0 {
        return Err(FrameError::InvalidInput("mother function vanishes on every node".into()));
    }
    let mother: Vec<f64> = raw.iter().map(|p| (p / sup).sqrt()).collect();
    let symbol: Vec<f64> =
        quad.nodes().iter().zip(&mother).map(|(&r, &psi)| 2.0 * PI * r.powf(nf - 1.0) * psi * psi).collect();
    let p = cfg.measure_power();
    let measure: Vec<f64> = quad.nodes().iter().map(|&r| r.powf(p)).collect();

    let (x_points, x_weight) = match &cfg.x_grid {
        XGrid::Uniform { samples, half_width } => {
            if *samples < 2 {
                return Err(FrameError::InvalidInput(format!("uniform x-grid needs at least 2 samples, got {samples}")));
            }
            let half = half_width.unwrap_or(PI / quad.spacing());
            if !(half.is_finite() && half > 0.0) {
                return Err(FrameError::InvalidInput(format!("x half-width must be positive, got {half}")));
            }
            let dx = 2.0 * half / (*samples - 1) as f64;
            ((0..*samples).map(|k| -half + dx * k as f64).collect::<Vec<_>>(), dx)
        }
        XGrid::Points { points, weight } => {
            if points.is_empty() || points.iter().any(|x| !x.is_finite()) {
                return Err(FrameError::InvalidInput("x-points must be finite and nonempty".into()));
            }
            if !(weight.is_finite() && *weight > 0.0) {
                return Err(FrameError::InvalidInput(format!("x weight must be positive, got {weight}")));
            }
            (points.clone(), *weight)
        }
    };

    let amplitude: Vec<f64> = (0..quad.len()).map(|i| mother[i] * (quad.weights()[i] * measure[i]).sqrt()).collect();
    let columns = CMatrix::from_fn(quad.len(), x_points.len(), |i, k| {
        C64::from_polar(amplitude[i], -x_points[k] * quad.nodes()[i])
    });
    let family = make_family(columns, format!("affine_cs n={n} r_nodes={} x_samples={}", quad.len(), x_points.len()))?;
    Ok(AffineCsFamily { family, quadrature: quad, x_points, x_weight, mother, measure, symbol, n })
}

impl AffineCsFamily {
    /// Columns scaled by `√x_weight`, so the plain frame operator is the Riemann sum over x.
    pub fn frame_scaled_family(&self) -> FamilyMatrix {
        let cols = self.family.columns() * C64::new(self.x_weight.sqrt(), 0.0);
        FamilyMatrix::new(cols, self.family.label()).expect("scaling preserves family invariants")
    }

    /// `Σ_k Δx ψ_{x_k} ψ_{x_k}*` in the weighted coordinates.
    pub fn frame_operator(&self) -> HermitianMatrix {
        let c = self.family.columns();
        HermitianMatrix::new((c * c.adjoint()) * C64::new(self.x_weight, 0.0)).expect("finite Gram product")
    }

    /// The multiplication operator `f(r) ↦ 2π r^{n-1}|ψ(r)|² f(r)` on the nodes.
    pub fn multiplication_operator(&self) -> HermitianMatrix {
        HermitianMatrix::from_real_diagonal(&self.symbol).expect("finite symbol")
    }

    /// `‖S_quad − S_mult‖_max / ‖S_mult‖_max`.
    pub fn operator_residual(&self) -> f64 {
        let s = self.frame_operator();
        let t = self.multiplication_operator();
        max_norm(&(s.as_matrix() - t.as_matrix())) / max_norm(t.as_matrix())
    }

    /// `⟨ψ_{x_k}, ψ_{x_k}⟩`.
    pub fn self_overlap(&self, k: usize) -> f64 {
        self.family.columns().column(k).norm_squared()
    }

    /// Quadrature of `∫ |ψ|² dμ`; equals every self-overlap.
    pub fn mother_norm_sq(&self) -> f64 {
        let (mother, measure) = (&self.mother, &self.measure);
        self.quadrature.weights().iter().enumerate().map(|(i, w)| w * mother[i] * mother[i] * measure[i]).sum()
    }

    /// Quadrature of the `Dom(S^{-1})` integral for a coherent state,
    /// `(2π)^{-2} ∫ r^{2-2n} |ψ(r)|^{-4} |ψ_x(r)|² dμ(r)`. It grows without bound as `r_max` increases.
    pub fn inverse_domain_integral(&self) -> f64 {
        let nf = self.n as f64;
        let nodes = self.quadrature.nodes();
        let mut total = 0.0;
        for (i, w) in self.quadrature.weights().iter().enumerate() {
            let psi_sq = self.mother[i] * self.mother[i];
            if psi_sq == 0.0 {
                return f64::INFINITY;
            }
            total += w * nodes[i].powf(2.0 - 2.0 * nf) / psi_sq * self.measure[i];
        }
        total / (4.0 * PI * PI)
    }

    /// `sup_i 2π r_i^{n-1}|ψ(r_i)|²` (1 after normalization).
    pub fn admissibility_sup(&self) -> f64 {
        self.symbol.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_rule_grammar() {
        assert_eq!(WeightRule::parse("pow:-1").unwrap(), WeightRule::Power(-1.0));
        assert_eq!(WeightRule::parse("const:2.5").unwrap(), WeightRule::Constant(2.5));
        assert_eq!(WeightRule::parse("values:1,2,3").unwrap(), WeightRule::List(vec![1.0, 2.0, 3.0]));
        assert!(WeightRule::parse("pow").is_err());
        assert!(WeightRule::parse("exp:2").is_err());
        assert!(WeightRule::parse("pow:x").is_err());
        let r = WeightRule::Power(-1.0);
        assert_eq!(WeightRule::parse(&r.to_string()).unwrap(), r);
    }

    #[test]
    fn list_rule_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.txt");
        std::fs::write(&path, "1.0, 0.5\n0.25").unwrap();
        let rule = WeightRule::parse(&format!("list:{}", path.display())).unwrap();
        assert_eq!(rule.values(3).unwrap(), vec![1.0, 0.5, 0.25]);
        assert!(rule.value(4).is_err());
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(WeightRule::Constant(0.0).value(1).is_err());
        assert!(WeightRule::List(vec![1.0, -2.0]).values(2).is_err());
    }

    #[test]
    fn diagonal_generators() {
        let f = gen_diagonal(&DiagonalWeights::new(WeightRule::Power(-1.0)), 3).unwrap();
        assert_eq!(f.columns()[(2, 2)].re, 1.0 / 3.0);
        let f = gen_diagonal(&DiagonalWeights::new(WeightRule::Constant(1.0)), 5).unwrap();
        assert_eq!(f.columns(), &CMatrix::identity(5, 5));
        let f = gen_diagonal(&DiagonalWeights::new(WeightRule::Power(1.0)), 3).unwrap();
        assert_eq!(f.columns()[(1, 1)].re, 2.0);
        assert_eq!(f.columns()[(2, 2)].re, 3.0);
    }

    #[test]
    fn multiplier_symbol_indexing() {
        let m = MultiplierModel::new(WeightRule::Power(2.0));
        assert_eq!(m.symbol_values(3).unwrap(), vec![1.0, 4.0, 9.0]);
        let f = gen_multiplier(&m, 3).unwrap();
        assert_eq!(f.columns()[(2, 2)].re, 3.0);
    }

    #[test]
    fn quadrature_rules() {
        let t = Quadrature::trapezoid(0.0, 1.0, 11).unwrap();
        assert!((t.integrate(|x| x) - 0.5).abs() < 1e-14);
        let m = Quadrature::midpoint(0.0, 1.0, 10).unwrap();
        assert!((m.integrate(|x| x) - 0.5).abs() < 1e-14);
        assert!((m.integrate(|x| x * x) - 1.0 / 3.0).abs() < 1e-3);
        assert!(Quadrature::trapezoid(1.0, 0.0, 5).is_err());
        assert!(Quadrature::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn affine_cs_is_admissible() {
        let fam = gen_affine_cs(&AffineCsConfig { r_nodes: 64, ..Default::default() }).unwrap();
        assert!((fam.admissibility_sup() - 1.0).abs() < 1e-12);
        assert!(fam.symbol.iter().all(|s| *s > 0.0));
    }

    #[test]
    fn affine_cs_single_sample_self_overlap() {
        for rule in [QuadratureRule::Midpoint, QuadratureRule::Trapezoid] {
            let cfg = AffineCsConfig {
                n: 2,
                r_nodes: 100,
                quadrature: rule,
                x_grid: XGrid::Points { points: vec![0.0], weight: 1.0 },
                ..Default::default()
            };
            let fam = gen_affine_cs(&cfg).unwrap();
            // x_0 = 0: the column is the weighted samples of ψ itself
            for i in 0..100 {
                let want = fam.mother[i] * (fam.quadrature.weights()[i] * fam.measure[i]).sqrt();
                assert!((fam.family.columns()[(i, 0)].re - want).abs() < 1e-15);
            }
            // n = 2: |ψ|² r^{n-1} = r^{-1} e^{-r} r up to normalization
            let direct = fam.quadrature.integrate(|r| r.powf(-1.0) * (-r).exp() * r);
            // normalization constant recovered from any node
            let r0 = fam.quadrature.nodes()[0];
            let scale = fam.mother[0].powi(2) / (r0.powf(-1.0) * (-r0).exp());
            assert!((fam.self_overlap(0) - scale * direct).abs() <= 1e-12 * fam.self_overlap(0));
            assert!((fam.self_overlap(0) - fam.mother_norm_sq()).abs() <= 1e-12 * fam.self_overlap(0));
        }
    }

    #[test]
    fn degenerate_configs_rejected() {
        assert!(gen_affine_cs(&AffineCsConfig { n: 0, ..Default::default() }).is_err());
        assert!(gen_affine_cs(&AffineCsConfig { r_max: -1.0, ..Default::default() }).is_err());
        let bad_x = AffineCsConfig { x_grid: XGrid::Points { points: vec![0.0], weight: 0.0 }, ..Default::default() };
        assert!(gen_affine_cs(&bad_x).is_err());
    }

    #[test]
    fn affine_cs_frame_operator_near_multiplication() {
        let fam = gen_affine_cs(&AffineCsConfig { r_nodes: 128, x_grid: XGrid::Uniform { samples: 64, half_width: None }, ..Default::default() }).unwrap();
        let coarse = fam.operator_residual();
        let fine = gen_affine_cs(&AffineCsConfig { r_nodes: 128, x_grid: XGrid::Uniform { samples: 127, half_width: None }, ..Default::default() })
            .unwrap()
            .operator_residual();
        assert!(coarse < 0.05, "coarse residual {coarse}");
        assert!(fine < coarse);
    }

    #[test]
    fn inverse_domain_integral_grows_with_domain() {
        let small = gen_affine_cs(&AffineCsConfig { r_max: 10.0, r_nodes: 200, ..Default::default() }).unwrap();
        let large = gen_affine_cs(&AffineCsConfig { r_max: 20.0, r_nodes: 400, ..Default::default() }).unwrap();
        assert!(large.inverse_domain_integral() > 1e3 * small.inverse_domain_integral());
    }
}
