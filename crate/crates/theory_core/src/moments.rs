use std::sync::OnceLock;

use rf_numerics::gauss_half_hermite;

use crate::TheoryError;

pub const DEFAULT_QUADRATURE_ORDER: usize = 80;

/// Gaussian-measure projections of an activation: `mu0 = E[s(u)]`,
/// `mu1 = E[u s(u)]`, `mu_star_sq = E[s(u)^2] - mu0^2 - mu1^2`.
///
/// Downstream formulas use the centred activation `s - mu0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationMoments {
    pub mu0: f64,
    pub mu1: f64,
    pub mu_star_sq: f64,
}

impl ActivationMoments {
    pub fn new(mu0: f64, mu1: f64, mu_star_sq: f64) -> Result<Self, TheoryError> {
        if !(mu_star_sq >= 0.0) || !mu1.is_finite() || !mu0.is_finite() {
            return Err(TheoryError::NegativeVariance(mu_star_sq));
        }
        Ok(Self { mu0, mu1, mu_star_sq })
    }

    pub fn relu() -> Self {
        static RELU: OnceLock<ActivationMoments> = OnceLock::new();
        *RELU.get_or_init(|| {
            activation_moments(|u| u.max(0.0), DEFAULT_QUADRATURE_ORDER)
                .expect("ReLU moments are well defined")
        })
    }

    pub fn linear() -> Self {
        Self { mu0: 0.0, mu1: 1.0, mu_star_sq: 0.0 }
    }

    pub fn mu_star(&self) -> f64 {
        self.mu_star_sq.sqrt()
    }
}

/// Moments of `sigma` under `u ~ N(0, 1)`.
///
/// The expectation is split at the origin and each half-line is integrated
/// with the half-normal Gauss rule, so activations with a kink at zero are
/// integrated to full precision.
pub fn activation_moments<F: Fn(f64) -> f64>(
    sigma: F,
    quadrature_order: usize,
) -> Result<ActivationMoments, TheoryError> {
    let rule = gauss_half_hermite(quadrature_order)?;
    let expect = |g: &dyn Fn(f64) -> f64| 0.5 * rule.expect(|u| g(u) + g(-u));
    let mu0 = expect(&|u| sigma(u));
    let mu1 = expect(&|u| u * sigma(u));
    // centred second moment avoids cancellation in E[s^2] - mu0^2
    let centred = expect(&|u| (sigma(u) - mu0).powi(2));
    let mut mu_star_sq = centred - mu1 * mu1;
    if mu_star_sq < -1e-12 || !mu_star_sq.is_finite() {
        return Err(TheoryError::NegativeVariance(mu_star_sq));
    }
    if mu_star_sq < 0.0 {
        mu_star_sq = 0.0;
    }
    Ok(ActivationMoments { mu0, mu1, mu_star_sq })
}
