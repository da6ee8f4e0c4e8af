use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rf_numerics::RidgeSystem;

use crate::data::draw_gaussian_matrix;
use crate::{LabError, Model, SimConfig};

/// One random-features student: first layer, covariate noise and readout.
#[derive(Debug, Clone, PartialEq)]
pub struct Learner {
    pub theta: DMatrix<f64>,
    /// Gaussian covariate noise, one row per training sample it was drawn for.
    pub w: Option<DMatrix<f64>>,
    pub a_hat: DVector<f64>,
}

impl Learner {
    /// Draws `Theta` and, in the Gaussian covariate model, `W` for `rows`
    /// training samples. The readout starts at zero.
    pub fn draw<R: Rng>(config: &SimConfig, rows: usize, rng: &mut R) -> Self {
        let theta = draw_gaussian_matrix(config.p, config.d, rng);
        let w = match config.model {
            Model::GaussianCovariate => Some(draw_gaussian_matrix(rows, config.p, rng)),
            Model::TrueRf => None,
        };
        Self {
            theta,
            w,
            a_hat: DVector::zeros(config.p),
        }
    }

    /// Draws features for `x` and fits the readout on `y`.
    pub fn train<R: Rng>(
        config: &SimConfig,
        x: &DMatrix<f64>,
        y: &DVector<f64>,
        rng: &mut R,
    ) -> Result<Self, LabError> {
        let mut learner = Self::draw(config, x.nrows(), rng);
        let z = featurize(&learner, x, config)?;
        learner.a_hat = fit(&z, y, config)?;
        Ok(learner)
    }

    /// Linear part of the predictor in the Gaussian covariate model,
    /// `mu1 Theta^T a / sqrt(D)`.
    pub(crate) fn linear_part(&self, mu1: f64) -> DVector<f64> {
        let d = self.theta.ncols() as f64;
        self.theta.tr_mul(&self.a_hat) * (mu1 / d.sqrt())
    }
}

/// Feature matrix `Z` (rows x P), already carrying the `1/sqrt(D)` factor.
pub fn featurize(learner: &Learner, x: &DMatrix<f64>, config: &SimConfig) -> Result<DMatrix<f64>, LabError> {
    let d = config.d;
    if x.ncols() != d || learner.theta.ncols() != d || learner.theta.nrows() != config.p {
        return Err(LabError::Dimension(format!(
            "X is {}x{}, Theta is {}x{}, config has D={}, P={}",
            x.nrows(),
            x.ncols(),
            learner.theta.nrows(),
            learner.theta.ncols(),
            d,
            config.p
        )));
    }
    let sd = (d as f64).sqrt();
    let pre = x * learner.theta.transpose() / sd;
    match config.model {
        Model::TrueRf => {
            let act = config.centred_activation();
            Ok(pre.map(|u| act(u) / sd))
        }
        Model::GaussianCovariate => {
            let w = learner
                .w
                .as_ref()
                .ok_or(LabError::Unsupported("Gaussian covariate learner without W"))?;
            if w.nrows() != x.nrows() || w.ncols() != config.p {
                return Err(LabError::Dimension(format!(
                    "W is {}x{}, expected {}x{}",
                    w.nrows(),
                    w.ncols(),
                    x.nrows(),
                    config.p
                )));
            }
            let m = config.activation.moments();
            Ok((pre * m.mu1 + w * m.mu_star()) / sd)
        }
    }
}

/// Ridge shift for a design with `rows` samples: `(P/D)(rows/D) lambda`.
pub(crate) fn ridge_shift(config: &SimConfig, rows: usize) -> f64 {
    let d = config.d as f64;
    config.p as f64 / d * (rows as f64 / d) * config.lambda
}

/// Minimizer of [`ridge_loss`]: `(Z^T Z + c I)^{-1} Z^T y / sqrt(D)`.
pub fn fit(z: &DMatrix<f64>, y: &DVector<f64>, config: &SimConfig) -> Result<DVector<f64>, LabError> {
    if z.nrows() != y.len() {
        return Err(LabError::Dimension(format!("Z has {} rows, y has {}", z.nrows(), y.len())));
    }
    if !(config.lambda > 0.0) {
        return Err(LabError::Config(format!("lambda must be > 0, got {}", config.lambda)));
    }
    let sys = RidgeSystem::new(&z.tr_mul(z), ridge_shift(config, z.nrows()))?;
    Ok(sys.solve(&z.tr_mul(y)) / (config.d as f64).sqrt())
}

/// `(1/rows) |y - sqrt(D) Z a|^2 + (P lambda / D) |a|^2`.
pub fn ridge_loss(z: &DMatrix<f64>, y: &DVector<f64>, a: &DVector<f64>, config: &SimConfig) -> f64 {
    let d = config.d as f64;
    let resid = y - z * a * d.sqrt();
    resid.norm_squared() / y.len() as f64 + config.p as f64 * config.lambda / d * a.norm_squared()
}
