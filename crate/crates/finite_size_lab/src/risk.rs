use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::data::draw_gaussian_matrix;
use crate::{seed, Dataset, LabError, Learner, Model, SimConfig};

/// A Monte Carlo estimate with its replicate structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean: f64,
    /// Standard error of `mean`, from independent outer replicates.
    pub std_error: f64,
    /// Spread of a single replicate.
    pub std_dev: f64,
    pub n_outer: usize,
    pub n_mid: usize,
    pub n_inner: usize,
    pub seed: u64,
}

impl SimEstimate {
    /// Mean, standard deviation and standard error of independent samples.
    pub fn from_samples(samples: &[f64], n_mid: usize, n_inner: usize, seed: u64) -> Self {
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            f64::NAN
        };
        Self {
            mean,
            std_error: (var / n as f64).sqrt(),
            std_dev: var.sqrt(),
            n_outer: n,
            n_mid,
            n_inner,
            seed,
        }
    }
}

/// Exact test error of the averaged Gaussian covariate predictor:
/// `|beta - mean_k g_k|^2 + mu_star^2 sum_k |a_k|^2 / K^2` with
/// `g_k = mu1 Theta_k^T a_k / sqrt(D)`.
pub fn test_error_closed_form(learners: &[Learner], dataset: &Dataset, config: &SimConfig) -> Result<f64, LabError> {
    if config.model != Model::GaussianCovariate {
        return Err(LabError::Unsupported("closed-form risk needs Gaussian covariates"));
    }
    if learners.is_empty() {
        return Err(LabError::Config("need at least one learner".into()));
    }
    let m = config.activation.moments();
    let k = learners.len() as f64;
    let mut g = DVector::zeros(config.d);
    let mut private = 0.0;
    for l in learners {
        if l.theta.ncols() != dataset.beta.len() {
            return Err(LabError::Dimension("Theta and beta disagree on D".into()));
        }
        g += l.linear_part(m.mu1);
        private += l.a_hat.norm_squared();
    }
    g /= k;
    Ok((&dataset.beta - g).norm_squared() + m.mu_star_sq * private / (k * k))
}

const MC_CHUNK: usize = 2048;

/// Squared error of the averaged predictor on `n_test` fresh noiseless
/// inputs drawn from the configuration's test stream.
pub fn test_error_mc(
    learners: &[Learner],
    dataset: &Dataset,
    config: &SimConfig,
    n_test: usize,
) -> Result<SimEstimate, LabError> {
    if n_test == 0 || learners.is_empty() {
        return Err(LabError::Config("need n_test >= 1 and at least one learner".into()));
    }
    let mut rng = seed::stream(config.seed, &[seed::TEST]);
    let k = learners.len() as f64;
    let sd = (config.d as f64).sqrt();
    let m = config.activation.moments();
    let act = config.centred_activation();
    let mut losses = Vec::with_capacity(n_test);
    let mut done = 0;
    while done < n_test {
        let rows = MC_CHUNK.min(n_test - done);
        let x = draw_gaussian_matrix(rows, config.d, &mut rng);
        let mut pred = DVector::zeros(rows);
        match config.model {
            Model::TrueRf => {
                for l in learners {
                    let feats = (&x * l.theta.transpose() / sd).map(&act);
                    pred += feats * &l.a_hat;
                }
            }
            Model::GaussianCovariate => {
                // each learner's test-time covariate noise is independent, so
                // its summed contribution is one Gaussian of matching scale
                let mut lin = DVector::zeros(config.d);
                let mut private = 0.0;
                for l in learners {
                    lin += l.linear_part(m.mu1);
                    private += l.a_hat.norm_squared();
                }
                pred = &x * lin;
                let scale = m.mu_star() * private.sqrt();
                for v in pred.iter_mut() {
                    *v += scale * rng.sample::<f64, _>(StandardNormal);
                }
            }
        }
        pred /= k;
        let target = &x * &dataset.beta;
        losses.extend((target - pred).iter().map(|e| e * e));
        done += rows;
    }
    Ok(SimEstimate::from_samples(&losses, 1, 1, config.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::make_dataset;

    #[test]
    fn zero_predictor_costs_teacher_norm() {
        let c = SimConfig::from_ratios(20, 1.0, 1.0, 1e-2).with_teacher(1.5, 0.0);
        let ds = make_dataset(&c).unwrap();
        let l = Learner::draw(&c, c.n, &mut seed::stream(0, &[]));
        let e = test_error_closed_form(&[l.clone()], &ds, &c).unwrap();
        assert!((e - 2.25).abs() < 1e-12);
        let mc = test_error_mc(&[l], &ds, &c, 20_000).unwrap();
        assert!((mc.mean - 2.25).abs() < 3.0 * mc.std_error);
    }

    #[test]
    fn true_rf_has_no_closed_form() {
        let c = SimConfig::from_ratios(20, 1.0, 1.0, 1e-2).with_model(Model::TrueRf);
        let ds = make_dataset(&c).unwrap();
        let l = Learner::draw(&c, c.n, &mut seed::stream(0, &[]));
        assert!(matches!(
            test_error_closed_form(&[l], &ds, &c),
            Err(LabError::Unsupported(_))
        ));
    }
}
