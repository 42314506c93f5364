use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid process spec: {0}")]
    Domain(String),
    /// A diffusion left the finite reals.
    #[error("non-finite state at t = {time}")]
    Blowup { time: f64 },
    #[error("path horizon {horizon} does not cover subsample time {needed}")]
    Range { horizon: f64, needed: f64 },
    #[error(transparent)]
    Kernel(#[from] kernel_core::KernelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(SimError::Domain(msg.into()))
}
