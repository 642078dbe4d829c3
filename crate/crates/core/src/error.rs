use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by state construction, estimation, certification and the
/// optical compiler.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index out of range: {index} >= {bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("state is not normalised (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semi-definite (smallest eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("incomplete data: {} missing setting(s), first: {}", .missing.len(), .missing.first().map(String::as_str).unwrap_or("?"))]
    IncompleteData { missing: Vec<String> },

    #[error("visibility undefined for subspace ({0},{1}): zero population")]
    UndefinedVisibility(usize, usize),

    #[error("entropy bound assumption violated: {0}")]
    AssumptionViolated(&'static str),

    #[error("optical layout error: {0}")]
    Layout(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("miscompiled network at {stage}: {reason}")]
    Miscompiled { stage: String, reason: String },

    #[error("invalid pair ({0},{1}) for dimension {2}")]
    InvalidPair(usize, usize, usize),
}

pub type Result<T> = core::result::Result<T, Error>;
