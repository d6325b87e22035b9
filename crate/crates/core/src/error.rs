use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum GeoError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point count mismatch: expected {expected}, got {got}")]
    CountMismatch { expected: usize, got: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error(
        "enumeration infeasible: {count} points exceeds the cap of {cap}; use the heuristic solver"
    )]
    EnumerationInfeasible { count: usize, cap: usize },

    #[error("invalid group element: {0}")]
    InvalidGroupElement(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("too few points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("dimension {0} exceeds the supported cap of {1}")]
    DimensionTooLarge(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sampler exhausted after {attempts} attempts without an admissible pair")]
    SamplerExhausted { attempts: usize },

    #[error("malformed data: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, GeoError>;
