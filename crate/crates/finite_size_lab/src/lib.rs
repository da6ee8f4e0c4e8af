//! Finite-size laboratory for random-features ridge regression.
//!
//! Simulates both the true random-features model and the Gaussian covariate
//! model, fits the ridge readout, and estimates test errors, nested variance
//! decompositions, ensembles and the finite-size trace quantities that the
//! asymptotic theory predicts.
//!
//! Every random draw comes from a stream derived from one root seed and a
//! path of loop indices, so results do not depend on thread count or on the
//! order in which work items run.

mod config;
mod data;
mod decomposition;
mod ensemble;
mod error;
pub mod exec;
mod learner;
mod risk;
pub mod seed;
mod traces;

pub use config::{Activation, Model, SimConfig};
pub use data::{draw_gaussian_matrix, draw_noise, draw_teacher, make_dataset, Dataset};
pub use decomposition::{empirical_decomposition, DecompositionEstimate};
pub use ensemble::{ensemble_run, EnsembleMode};
pub use error::LabError;
pub use exec::Execution;
pub use learner::{featurize, fit, ridge_loss, Learner};
pub use risk::{test_error_closed_form, test_error_mc, SimEstimate};
pub use traces::{estimate_psi_traces, psi_traces_single, PsiEstimate, TraceMode};
