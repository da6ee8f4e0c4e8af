//! Numerical kernels shared by the theory and simulation crates.
//!
//! Everything here is a pure function of its inputs.

mod error;
pub mod hessian;
pub mod linalg;
pub mod newton;
pub mod quadrature;

pub use error::NumericsError;
pub use hessian::{fd_hessian, DEFAULT_FD_STEP};
pub use linalg::{ridge_solve, solve_symmetric, RidgeSystem, MAX_CONDITION};
pub use newton::{newton_solve, NewtonOptions, RootResult};
pub use quadrature::{gauss_half_hermite, gauss_hermite, Quadrature};
