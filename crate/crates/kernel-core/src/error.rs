use thiserror::Error;

#[derive(Debug, Error)]
pub enum KernelError {
    /// An input violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected} states, got {got}")]
    Dimension { expected: usize, got: usize },
    /// A numerical routine could not meet its accuracy contract.
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, KernelError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(KernelError::Domain(msg.into()))
}
