use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum FrameError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("singular operator: {0}")]
    SingularOperator(String),

    #[error("family is not a lower semi-frame at this truncation: {0}")]
    NotLowerSemiFrame(String),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NotConverged { sweeps: usize, off_norm: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FrameError {
    pub(crate) fn dims(expected: usize, found: usize) -> Self {
        FrameError::DimMismatch { expected, found }
    }
}

pub type Result<T> = std::result::Result<T, FrameError>;
