//! Vector families `Ψ = (ψ_k)` stored as `d x N` column matrices, and
//! generators that produce a truncation of an infinite family at any `d`.

use serde::{Deserialize, Serialize};

use crate::error::{FrameError, Result};
use crate::generators::{gen_affine_cs, gen_diagonal, gen_multiplier, AffineCsConfig, DiagonalWeights, MultiplierModel};
use crate::spectral::{ensure_finite, real_vector, CMatrix, HVector};

/// A finite family of vectors in `C^d`; column `k` is `ψ_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyMatrix {
    columns: CMatrix,
    label: String,
}

impl FamilyMatrix {
    pub fn new(columns: CMatrix, label: impl Into<String>) -> Result<Self> {
        make_family(columns, label)
    }

    pub fn identity(dim: usize) -> Self {
        Self { columns: CMatrix::identity(dim, dim), label: format!("identity({dim})") }
    }

    /// Columns `w_k e_k`.
    pub fn from_real_diagonal(weights: &[f64], label: impl Into<String>) -> Result<Self> {
        make_family(CMatrix::from_diagonal(&real_vector(weights)), label)
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn count(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn into_columns(self) -> CMatrix {
        self.columns
    }

    pub fn column(&self, k: usize) -> HVector {
        self.columns.column(k).into_owned()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

/// Validates and wraps a column matrix.
pub fn make_family(columns: CMatrix, label: impl Into<String>) -> Result<FamilyMatrix> {
    if columns.nrows() == 0 || columns.ncols() == 0 {
        return Err(FrameError::InvalidFamily(format!(
            "family must have positive dimension and count, got {}x{}",
            columns.nrows(),
            columns.ncols()
        )));
    }
    ensure_finite(&columns)?;
    if let Some(k) = (0..columns.ncols()).find(|&k| columns.column(k).iter().all(|z| z.norm() == 0.0)) {
        return Err(FrameError::InvalidFamily(format!("column {k} is identically zero")));
    }
    Ok(FamilyMatrix { columns, label: label.into() })
}

/// Rule producing the truncation of an infinite family at dimension `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyGenerator {
    DiagonalWeights(DiagonalWeights),
    AffineCs(AffineCsConfig),
    MultiplierModel(MultiplierModel),
    /// A fixed family; only its own dimension is supported.
    #[serde(skip)]
    Explicit(FamilyMatrix),
}

impl FamilyGenerator {
    pub fn kind(&self) -> &'static str {
        match self {
            FamilyGenerator::DiagonalWeights(_) => "diagonal_weights",
            FamilyGenerator::AffineCs(_) => "affine_cs",
            FamilyGenerator::MultiplierModel(_) => "multiplier_model",
            FamilyGenerator::Explicit(_) => "explicit",
        }
    }

    /// Whether the first `d` coordinates of each column are independent of the truncation.
    pub fn is_coordinate_stable(&self) -> bool {
        matches!(self, FamilyGenerator::DiagonalWeights(_) | FamilyGenerator::MultiplierModel(_))
    }

    pub fn produce(&self, d: usize) -> Result<FamilyMatrix> {
        if d == 0 {
            return Err(FrameError::InvalidInput("truncation dimension must be positive".into()));
        }
        match self {
            FamilyGenerator::DiagonalWeights(w) => gen_diagonal(w, d),
            FamilyGenerator::MultiplierModel(m) => gen_multiplier(m, d),
            FamilyGenerator::AffineCs(cfg) => {
                if d < 2 {
                    return Err(FrameError::InvalidInput(format!(
                        "affine coherent states need at least 2 quadrature nodes, got {d}"
                    )));
                }
                let cfg = AffineCsConfig { r_nodes: d, ..cfg.clone() };
                Ok(gen_affine_cs(&cfg)?.frame_scaled_family())
            }
            FamilyGenerator::Explicit(f) => {
                if f.dim() != d {
                    return Err(FrameError::InvalidInput(format!(
                        "explicit family has dimension {}, cannot produce d={d}",
                        f.dim()
                    )));
                }
                Ok(f.clone())
            }
        }
    }
}

pub fn truncate(g: &FamilyGenerator, d: usize) -> Result<FamilyMatrix> {
    g.produce(d)
}

/// Strictly increasing list of truncation dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct TruncationSweep {
    dims: Vec<usize>,
}

impl TruncationSweep {
    pub const DEFAULT_DIMS: [usize; 6] = [8, 16, 32, 64, 128, 256];

    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(FrameError::InvalidInput("sweep needs at least one dimension".into()));
        }
        if dims[0] == 0 {
            return Err(FrameError::InvalidInput("sweep dimensions must be positive".into()));
        }
        if dims.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FrameError::InvalidInput(format!("sweep dimensions must be strictly increasing: {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
}

impl Default for TruncationSweep {
    fn default() -> Self {
        Self { dims: Self::DEFAULT_DIMS.to_vec() }
    }
}

impl TryFrom<Vec<usize>> for TruncationSweep {
    type Error = FrameError;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<TruncationSweep> for Vec<usize> {
    fn from(s: TruncationSweep) -> Self {
        s.dims
    }
}
