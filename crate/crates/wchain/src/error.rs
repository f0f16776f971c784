use thiserror::Error;

/// Errors produced by chain construction, propagation and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain spec: {0}")]
    InvalidSpec(String),

    #[error("invalid noise field: {0}")]
    InvalidNoise(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mapping undefined: {0}")]
    MappingUndefined(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("system of {0} qubits exceeds the exact-reference limit of {1}")]
    ReferenceTooLarge(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
