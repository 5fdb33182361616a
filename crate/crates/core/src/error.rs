use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("singular input: {0}")]
    Singular(String),

    #[error("unknown test family `{0}`")]
    UnknownFamily(String),

    #[error("regime mismatch: {0}")]
    Regime(String),

    #[error("integral diverges: {0}")]
    Divergence(String),

    #[error("normalization failed: {0}")]
    Normalization(String),

    #[error("unknown registry entry `{0}`")]
    Registry(String),

    #[error("usage error: {0}")]
    Usage(String),
}
