use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("degenerate dynamics: {0}")]
    DegenerateDynamics(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("phase grid of {grid} points is too coarse for dimension {dim} (need at least {min})")]
    Resolution { grid: usize, dim: usize, min: usize },

    #[error("mean resultant length order {order} out of range for dimension {dim}")]
    OrderOutOfRange { order: usize, dim: usize },

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("sweep failed: {0}")]
    Sweep(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = CoreError> = std::result::Result<T, E>;
