use thiserror::Error;

use crate::operators::StepFraction;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("oracle size {size} exceeds cap {cap}")]
    OracleCap { size: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exponential for step fraction {0} has not been prepared")]
    MissingExponential(StepFraction),

    #[error("integration diverged at step {step} (non-finite values)")]
    Divergence { step: usize },

    #[error("finite-time blow-up of the nonlinear flow")]
    BlowUp,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("reference solutions disagree: if4/split4 difference {difference:.3e} exceeds {limit:.3e}")]
    ReferenceMismatch { difference: f64, limit: f64 },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
