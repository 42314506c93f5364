use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Sim(#[from] process_sim::SimError),
    #[error(transparent)]
    Kernel(#[from] kernel_core::KernelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, MeasureError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(MeasureError::Domain(msg.into()))
}
