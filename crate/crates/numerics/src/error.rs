use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("non-finite function value at probe point {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("matrix is not positive definite after shift c = {shift}")]
    Indefinite { shift: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}
