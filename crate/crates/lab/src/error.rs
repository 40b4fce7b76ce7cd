use thiserror::Error;

/// Lab-level failures, mapped onto the CLI exit codes:
/// 0 success, 1 invariant failure, 2 invalid config, 3 inconclusive.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invariant failure: {0}")]
    InvariantFailure(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error(transparent)]
    Core(#[from] nls_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::InvalidConfig(_) | LabError::Json(_) => 2,
            LabError::Inconclusive(_) => 3,
            _ => 1,
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
