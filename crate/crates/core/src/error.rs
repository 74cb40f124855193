//! Error type shared by every module of the engine.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GvarError>;

#[derive(Debug, Error)]
pub enum GvarError {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid or engine configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// A query point or index falls outside the range the result can be trusted on.
    #[error("range error: {0}")]
    Range(String),

    /// Not enough observations before the requested date.
    #[error("insufficient history: need at least {required} observations, have {available}")]
    InsufficientHistory { required: usize, available: usize },

    /// Least-squares design matrix is singular.
    #[error("singular fit on {series} series: lagged values have zero variance")]
    SingularFit { series: &'static str },

    /// Inputs violate a caller-side contract (misaligned or empty sequences).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Malformed or invalid input file row (1-based line number, header included).
    #[error("ingestion error at line {line}: {message}")]
    Ingestion { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GvarError {
    /// Process exit code used by the `gvar` CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            GvarError::Ingestion { .. } => 3,
            GvarError::InsufficientHistory { .. } => 4,
            GvarError::Io(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GvarError::Domain(msg.into())
    }
}
