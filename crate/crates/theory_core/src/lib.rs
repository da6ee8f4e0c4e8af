//! Closed-form asymptotics of random-features ridge regression.
//!
//! The pipeline is: activation moments, then the stationary point of the
//! replica action `S0(q, r)`, then six order-parameter traces (the [`PsiSet`])
//! read off as Hessian traces of two-copy actions and source terms, and
//! finally the error formulas for single models, ensembles and
//! divide-and-conquer predictors.

mod action;
mod decompose;
mod error;
mod moments;
mod params;
mod prefactor;
mod psi;
mod saddle;

pub use action::{
    action_divide, action_ensemble, action_s0, action_vanilla, divide_curvature,
    ensemble_curvature, s0_gradient,
};
pub use decompose::{
    decompose_error, divide_conquer_error, ensemble_error, optimal_lambda, ErrorDecomposition,
};
pub use error::TheoryError;
pub use moments::{activation_moments, ActivationMoments, DEFAULT_QUADRATURE_ORDER};
pub use params::ModelParams;
pub use prefactor::{prefactor, PsiKind};
pub use psi::{psi_terms, psi_terms_at, PsiSet};
pub use saddle::{solve_saddle, SaddlePoint, SADDLE_TOL};
