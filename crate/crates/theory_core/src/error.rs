use rf_numerics::NumericsError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("outside the domain: {0}")]
    Domain(&'static str),
    #[error("saddle point not found (best scaled residual {best_residual:e})")]
    Saddle { best_residual: f64 },
    #[error("activation has negative residual variance {0:e}")]
    NegativeVariance(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
