use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{seed, LabError, SimConfig};

/// Training inputs, teacher, labels and the noise realization behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub beta: DVector<f64>,
    pub y: DVector<f64>,
    pub eps: DVector<f64>,
}

impl Dataset {
    /// Labels `y = X beta + eps`.
    pub fn from_parts(x: DMatrix<f64>, beta: DVector<f64>, eps: DVector<f64>) -> Self {
        let y = &x * &beta + &eps;
        Self { x, beta, y, eps }
    }
}

pub fn draw_gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<f64> {
    // column-major fill keeps the draw order tied to storage order
    DMatrix::from_iterator(rows, cols, (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Uniform direction on the sphere, scaled to norm exactly `f`.
pub fn draw_teacher<R: Rng>(d: usize, f: f64, rng: &mut R) -> DVector<f64> {
    loop {
        let g = DVector::from_iterator(d, (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)));
        let norm = g.norm();
        if norm > 0.0 {
            return g * (f / norm);
        }
    }
}

pub fn draw_noise<R: Rng>(n: usize, tau: f64, rng: &mut R) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| tau * rng.sample::<f64, _>(StandardNormal)))
}

pub fn make_dataset(config: &SimConfig) -> Result<Dataset, LabError> {
    config.validate()?;
    let beta = draw_teacher(config.d, config.f, &mut seed::stream(config.seed, &[seed::TEACHER]));
    let x = draw_gaussian_matrix(config.n, config.d, &mut seed::stream(config.seed, &[seed::INPUTS]));
    let eps = draw_noise(config.n, config.tau, &mut seed::stream(config.seed, &[seed::NOISE]));
    Ok(Dataset::from_parts(x, beta, eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_labels_are_linear() {
        let c = SimConfig::from_ratios(20, 1.0, 2.0, 1e-2).with_seed(3);
        let ds = make_dataset(&c).unwrap();
        assert_eq!(ds.y, &ds.x * &ds.beta);
    }

    #[test]
    fn teacher_norm_is_exact() {
        let c = SimConfig::from_ratios(50, 1.0, 1.0, 1e-2).with_teacher(2.5, 0.3).with_seed(9);
        let ds = make_dataset(&c).unwrap();
        assert!((ds.beta.norm() - 2.5).abs() < 1e-12);
    }
}
