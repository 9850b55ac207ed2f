use thiserror::Error;

/// Errors surfaced by construction and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime power in the supported range")]
    NotPrimePower(u32),

    #[error("the two-element field is not supported")]
    FieldTooSmall,

    #[error("division by zero in GF({0})")]
    DivisionByZero(u32),

    #[error("unsupported algebra kind: {0}")]
    UnsupportedKind(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("algebra has no level-1 decomposition: {0}")]
    NotLevelOneDegenerate(String),

    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("point set is not quadric-like: {0}")]
    NotAQuadricLikeSet(String),

    #[error("shape violation: {0}")]
    ShapeViolation(String),

    #[error("two distinct symp candidates through one pair: {0}")]
    AmbiguousSymp(String),

    #[error("symp shapes are not uniform: {0}")]
    NonUniformShapes(String),

    #[error("line is not an X-line: {0}")]
    NotAnXLine(String),

    #[error("projection center is not collinear to all of X")]
    NotCollinearVertex,

    #[error("model schema error: {0}")]
    SchemaError(String),

    #[error("invalid configuration: {0}")]
    ConfigError(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
