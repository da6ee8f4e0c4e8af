use rf_theory::ActivationMoments;

use crate::LabError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Relu,
    Linear,
    /// Only the Gaussian covariate model can use an activation known solely
    /// through its moments.
    Moments(ActivationMoments),
}

impl Activation {
    pub fn moments(&self) -> ActivationMoments {
        match self {
            Activation::Relu => ActivationMoments::relu(),
            Activation::Linear => ActivationMoments::linear(),
            Activation::Moments(m) => *m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    TrueRf,
    GaussianCovariate,
}

/// Sizes, regularization, teacher and randomness of one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub d: usize,
    pub p: usize,
    pub n: usize,
    pub lambda: f64,
    pub f: f64,
    pub tau: f64,
    pub activation: Activation,
    pub model: Model,
    pub seed: u64,
    /// Fresh test points for Monte Carlo test errors.
    pub n_test: usize,
}

impl SimConfig {
    /// `P = round(psi1 D)`, `N = round(psi2 D)`, ReLU, Gaussian covariates,
    /// unit teacher and no label noise.
    pub fn from_ratios(d: usize, psi1: f64, psi2: f64, lambda: f64) -> Self {
        Self {
            d,
            p: ((psi1 * d as f64).round() as usize).max(1),
            n: ((psi2 * d as f64).round() as usize).max(1),
            lambda,
            f: 1.0,
            tau: 0.0,
            activation: Activation::Relu,
            model: Model::GaussianCovariate,
            seed: 0,
            n_test: 10_000,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = model;
        self
    }

    pub fn with_teacher(mut self, f: f64, tau: f64) -> Self {
        self.f = f;
        self.tau = tau;
        self
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn psi1(&self) -> f64 {
        self.p as f64 / self.d as f64
    }

    pub fn psi2(&self) -> f64 {
        self.n as f64 / self.d as f64
    }

    pub fn validate(&self) -> Result<(), LabError> {
        if self.d < 2 || self.p < 1 || self.n < 1 {
            return Err(LabError::Config(format!(
                "need D >= 2, P >= 1, N >= 1 (got D={}, P={}, N={})",
                self.d, self.p, self.n
            )));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(LabError::Config(format!("lambda must be > 0, got {}", self.lambda)));
        }
        if !(self.f >= 0.0 && self.tau >= 0.0) {
            return Err(LabError::Config("F and tau must be >= 0".into()));
        }
        if self.model == Model::TrueRf && matches!(self.activation, Activation::Moments(_)) {
            return Err(LabError::Unsupported(
                "the true random-features model needs an explicit activation",
            ));
        }
        Ok(())
    }

    /// Centred activation applied elementwise in the true model.
    pub(crate) fn centred_activation(&self) -> impl Fn(f64) -> f64 {
        let mu0 = self.activation.moments().mu0;
        let relu = matches!(self.activation, Activation::Relu);
        move |u| if relu { u.max(0.0) - mu0 } else { u - mu0 }
    }
}
