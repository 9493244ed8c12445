use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A code description is malformed (bad support, out-of-range shift, ...).
    #[error("invalid code spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected length {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// Decoder thresholds or other run configuration is invalid for the code.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive routine refused an instance that is too large to enumerate.
    #[error("refused: {0}")]
    Guard(String),

    /// The operation's structural preconditions do not hold for this input
    /// (e.g. an even column weight passed to the odd-weight bound).
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no key found after {attempts} attempts")]
    NoKeyFound { attempts: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
