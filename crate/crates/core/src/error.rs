use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CedError>;

#[derive(Debug, Error)]
pub enum CedError {
    #[error("non-positive price {value} at index {index}")]
    NonPositivePrice { index: usize, value: f64 },

    #[error("series too short: need at least {required} points, got {actual}")]
    TooShort { required: usize, actual: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("timestamps must be strictly increasing (index {index})")]
    UnorderedTimestamps { index: usize },

    #[error("return {value} at index {index} is <= -1; compounding undefined")]
    ReturnWipeout { index: usize, value: f64 },

    #[error("window length {window} exceeds series length {length}")]
    WindowTooLong { window: usize, length: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("confidence level must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("tail is empty: floor({size} * (1 - {alpha})) = 0; use a larger sample or a smaller alpha")]
    EmptyTail { size: usize, alpha: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("portfolio risk is zero; contributions undefined")]
    ZeroPortfolioRisk,

    #[error("AR(1) requires |kappa| < 1, got {0}")]
    NonStationary(f64),

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("csv row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("linear program {0}")]
    Solver(String),
}

impl CedError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CedError::Io {
            path: path.into(),
            source,
        }
    }
}
