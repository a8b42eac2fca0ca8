use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable x{index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("repeated variable x{0} in a multilinear term")]
    RepeatedIndex(u32),

    #[error("degree {degree} exceeds the configured maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("expansion budget exceeded: {needed} > {budget} (choose a smaller instance or raise PTF_FOOL_BUDGET)")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("value not representable in this scalar type: {0}")]
    Inexact(String),

    #[error("numerical procedure did not converge: {0}")]
    NoConvergence(String),

    #[error("factor search exhausted its budget; best residual correlation {best_correlation}")]
    SearchExhausted { best_correlation: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
