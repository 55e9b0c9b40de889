use thiserror::Error;

/// Errors produced by the modeling, packing, fitting and exploration routines.
#[derive(Debug, Error)]
pub enum FjmError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("malformed curve: {0}")]
    MalformedCurve(String),

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    /// The observation cannot be explained by the stiffness model (e.g. it implies ε ≥ 1).
    #[error("outside model validity: {0}")]
    OutOfModel(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("no feasible design; binding constraints: {}", .binding.join(", "))]
    NoFeasibleDesign { binding: Vec<String> },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl FjmError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        FjmError::InvalidArgument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, FjmError>;
