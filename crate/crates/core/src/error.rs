use thiserror::Error;

/// Errors raised by problem construction, the solvers and the I/O layer.
#[derive(Debug, Error)]
pub enum SipError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: &'static str,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no strict feasibility evidence: certified sup of the constraints at the Slater point is {bound:e}, not negative")]
    NoStrictFeasibility { bound: f64 },

    #[error("objective not convex: {0}")]
    NotConvex(String),

    #[error("lower-level solver exhausted {evaluations} evaluations with gap {gap:e} > requested {requested:e}")]
    OracleBudget {
        evaluations: u64,
        gap: f64,
        requested: f64,
    },

    #[error("schema error in field `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = SipError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> SipError {
    SipError::InvalidInput(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> SipError {
    SipError::InvalidConfig(msg.into())
}
