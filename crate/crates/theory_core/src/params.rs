use crate::{ActivationMoments, TheoryError};

/// A point of the asymptotic phase diagram.
///
/// `psi1 = P/D`, `psi2 = N/D`, `lambda` is the ridge constant, `f` the
/// teacher norm, `tau` the label-noise level and `tau_test` the noise on
/// fresh test labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub psi1: f64,
    pub psi2: f64,
    pub lambda: f64,
    pub moments: ActivationMoments,
    pub f: f64,
    pub tau: f64,
    pub tau_test: f64,
}

impl ModelParams {
    /// ReLU moments, unit teacher norm, no label noise.
    pub fn new(psi1: f64, psi2: f64, lambda: f64) -> Self {
        Self {
            psi1,
            psi2,
            lambda,
            moments: ActivationMoments::relu(),
            f: 1.0,
            tau: 0.0,
            tau_test: 0.0,
        }
    }

    pub fn with_moments(mut self, moments: ActivationMoments) -> Self {
        self.moments = moments;
        self
    }

    pub fn with_teacher(mut self, f: f64, tau: f64) -> Self {
        self.f = f;
        self.tau = tau;
        self
    }

    /// Teacher of norm 1 with `tau = 1 / snr`.
    pub fn with_snr(self, snr: f64) -> Self {
        self.with_teacher(1.0, 1.0 / snr)
    }

    pub fn with_psi1(mut self, psi1: f64) -> Self {
        self.psi1 = psi1;
        self
    }

    pub fn with_psi2(mut self, psi2: f64) -> Self {
        self.psi2 = psi2;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(TheoryError::InvalidArgument(format!("{name} must be > 0, got {v}")))
            }
        };
        positive(self.psi1, "psi1")?;
        positive(self.psi2, "psi2")?;
        positive(self.lambda, "lambda")?;
        for (v, name) in [(self.f, "F"), (self.tau, "tau"), (self.tau_test, "tau_test")] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(TheoryError::InvalidArgument(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.moments.mu_star_sq >= 0.0) {
            return Err(TheoryError::NegativeVariance(self.moments.mu_star_sq));
        }
        Ok(())
    }
}
