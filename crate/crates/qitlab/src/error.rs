use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("entry count {len} does not match dim^2 = {expected}")]
    BadEntryCount { len: usize, expected: usize },

    #[error("matrix is not Hermitian (worst deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is not 1 (got {trace:.12e})")]
    NotNormalized { trace: f64 },

    #[error("matrix is not a projector (||P^2 - P||_F = {deviation:.3e})")]
    NotProjector { deviation: f64 },

    #[error("probabilities invalid: {reason}")]
    BadDistribution { reason: String },

    #[error("support of the first argument is not contained in the support of the second")]
    SupportViolation,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("problem size {size} exceeds the exact-enumeration cap {cap}")]
    EnumerationTooLarge { size: u128, cap: u128 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
