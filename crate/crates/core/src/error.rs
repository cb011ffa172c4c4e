use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spin must be a positive half-integer, got {0}")]
    InvalidSpin(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("basis is not orthonormal and complete (deviation {deviation:.3e})")]
    InvalidBasis { deviation: f64 },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("state too large: {size} amplitudes exceeds the guard of {limit}")]
    SizeGuard { size: u128, limit: u128 },

    #[error("eigen-decomposition did not converge: {0}")]
    NoConvergence(String),

    #[error("transfer operator is not real: imaginary part {0:.3e}")]
    NotReal(f64),

    #[error("no correlation to fit: {0}")]
    NoCorrelation(String),

    #[error("fit aborted: {0}")]
    Fit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
