use rf_numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported in this model: {0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
