use nalgebra::{DMatrix, DVector};
use rf_numerics::RidgeSystem;
use rf_theory::ErrorDecomposition;

use crate::data::{draw_gaussian_matrix, draw_noise};
use crate::exec::{map_indices, Execution};
use crate::learner::ridge_shift;
use crate::{featurize, make_dataset, seed, LabError, Learner, Model, SimConfig};

/// Nested-resampling estimate of the four error components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionEstimate {
    pub estimate: ErrorDecomposition,
    /// Jackknife over datasets; NaN with fewer than three datasets.
    pub std_error: ErrorDecomposition,
    pub n_x: usize,
    pub n_theta: usize,
    pub n_eps: usize,
    pub seed: u64,
}

/// A predictor seen as an element of the test-error inner-product space:
/// a component `shared` that every predictor lives in, plus a `private`
/// part orthogonal to the private part of every other element at the same
/// level. Only its squared norm is kept.
#[derive(Debug, Clone)]
struct Element {
    shared: DVector<f64>,
    private: f64,
}

/// Mean element and unbiased sample variance `(1/(n-1)) sum |e_j - mean|^2`.
fn spread(parts: &[Element]) -> (Element, f64) {
    let n = parts.len() as f64;
    let mut shared = DVector::zeros(parts[0].shared.len());
    for p in parts {
        shared += &p.shared;
    }
    shared /= n;
    let total_private: f64 = parts.iter().map(|p| p.private).sum();
    let own = (1.0 - 1.0 / n).powi(2);
    let var = parts
        .iter()
        .map(|p| (&p.shared - &shared).norm_squared() + own * p.private + (total_private - p.private) / (n * n))
        .sum::<f64>()
        / (n - 1.0);
    (
        Element {
            shared,
            private: total_private / (n * n),
        },
        var,
    )
}

/// What one (dataset, features) cell contributes after its noise loop.
struct Cell {
    mean: Element,
    noise_var: f64,
    loss: f64,
}

/// What one dataset contributes after its feature loop.
struct Outer {
    mean: Element,
    noise: f64,
    theta_var: f64,
    loss: f64,
}

/// Projects readouts into the inner-product space in which the squared
/// distance to the teacher is the test error.
enum Embedding {
    Covariate { mu1: f64, mu_star: f64 },
    TestSet { scale: f64 },
}

struct Setup<'a> {
    config: &'a SimConfig,
    target: DVector<f64>,
    beta: DVector<f64>,
    test_x: Option<DMatrix<f64>>,
    embedding: Embedding,
    n_eps: usize,
}

impl Setup<'_> {
    fn cell(&self, i: usize, j: usize) -> Result<Cell, LabError> {
        let c = self.config;
        let root = c.seed;
        let (iu, ju) = (i as u64, j as u64);
        let x = draw_gaussian_matrix(c.n, c.d, &mut seed::stream(root, &[seed::DECOMPOSITION, iu, seed::INPUTS]));
        let learner = Learner::draw(c, c.n, &mut seed::stream(root, &[seed::DECOMPOSITION, iu, ju, seed::FEATURES]));
        let z = featurize(&learner, &x, c)?;
        let sys = RidgeSystem::new(&z.tr_mul(&z), ridge_shift(c, c.n))?;
        let clean = z.tr_mul(&(&x * &self.beta));
        let sd = (c.d as f64).sqrt();
        let test_feats = match (&self.embedding, &self.test_x) {
            (Embedding::TestSet { .. }, Some(tx)) => {
                let act = c.centred_activation();
                Some((tx * learner.theta.transpose() / sd).map(act))
            }
            _ => None,
        };
        // full vectors: shared part stacked on the private block
        let mut full = Vec::with_capacity(self.n_eps);
        let mut loss = 0.0;
        let shared_len = self.target.len();
        for k in 0..self.n_eps {
            let eps = draw_noise(
                c.n,
                c.tau,
                &mut seed::stream(root, &[seed::DECOMPOSITION, iu, ju, k as u64, seed::NOISE]),
            );
            let a = sys.solve(&(&clean + z.tr_mul(&eps))) / sd;
            let v = match &self.embedding {
                Embedding::Covariate { mu1, mu_star } => {
                    let lin = learner.theta.tr_mul(&a) * (mu1 / sd);
                    let mut v = DVector::zeros(shared_len + c.p);
                    v.rows_mut(0, shared_len).copy_from(&lin);
                    v.rows_mut(shared_len, c.p).copy_from(&(&a * *mu_star));
                    v
                }
                Embedding::TestSet { scale } => test_feats.as_ref().expect("test features") * &a * *scale,
            };
            let resid_shared = (&self.target - v.rows(0, shared_len)).norm_squared();
            let private = v.len() - shared_len;
            loss += resid_shared + v.rows(shared_len, private).norm_squared();
            full.push(v);
        }
        let full_parts: Vec<Element> = full.into_iter().map(|v| Element { shared: v, private: 0.0 }).collect();
        let (m, noise_var) = spread(&full_parts);
        let private = m.shared.len() - shared_len;
        Ok(Cell {
            mean: Element {
                shared: m.shared.rows(0, shared_len).into_owned(),
                private: m.shared.rows(shared_len, private).norm_squared(),
            },
            noise_var,
            loss: loss / self.n_eps as f64,
        })
    }
}

fn outer(cells: Vec<Cell>) -> Outer {
    let n = cells.len() as f64;
    let noise = cells.iter().map(|c| c.noise_var).sum::<f64>() / n;
    let loss = cells.iter().map(|c| c.loss).sum::<f64>() / n;
    let means: Vec<Element> = cells.into_iter().map(|c| c.mean).collect();
    let (mean, theta_var) = spread(&means);
    Outer {
        mean,
        noise,
        theta_var,
        loss,
    }
}

fn combine(outers: &[&Outer], target: &DVector<f64>, n_theta: usize, n_eps: usize) -> ErrorDecomposition {
    let n = outers.len() as f64;
    let noise = outers.iter().map(|o| o.noise).sum::<f64>() / n;
    let theta_var = outers.iter().map(|o| o.theta_var).sum::<f64>() / n;
    let total = outers.iter().map(|o| o.loss).sum::<f64>() / n;
    let means: Vec<Element> = outers.iter().map(|o| o.mean.clone()).collect();
    let (grand, x_var) = spread(&means);
    ErrorDecomposition {
        noise,
        init: theta_var - noise / n_eps as f64,
        samp: x_var - theta_var / n_theta as f64,
        bias: (target - &grand.shared).norm_squared() + grand.private - x_var / n,
        total,
    }
}

/// Three-level nested resampling over datasets, feature draws and label
/// noise with the teacher held fixed.
///
/// Each component is an unbiased estimate of the corresponding nested
/// variance, and the four add up to the mean observed test error exactly.
/// Only the noise term is non-negative by construction.
pub fn empirical_decomposition(
    config: &SimConfig,
    n_x: usize,
    n_theta: usize,
    n_eps: usize,
    exec: Execution,
) -> Result<DecompositionEstimate, LabError> {
    config.validate()?;
    if n_x < 2 || n_theta < 2 || n_eps < 2 {
        return Err(LabError::Config(format!(
            "need at least two replicates per level (got {n_x}, {n_theta}, {n_eps})"
        )));
    }
    let beta = make_dataset(&SimConfig { n: 1, ..*config })?.beta;
    let m = config.activation.moments();
    let (target, test_x, embedding) = match config.model {
        Model::GaussianCovariate => (
            beta.clone(),
            None,
            Embedding::Covariate {
                mu1: m.mu1,
                mu_star: m.mu_star(),
            },
        ),
        Model::TrueRf => {
            if config.n_test == 0 {
                return Err(LabError::Config("n_test must be >= 1".into()));
            }
            let tx = draw_gaussian_matrix(
                config.n_test,
                config.d,
                &mut seed::stream(config.seed, &[seed::DECOMPOSITION, seed::TEST]),
            );
            let scale = 1.0 / (config.n_test as f64).sqrt();
            (&tx * &beta * scale, Some(tx), Embedding::TestSet { scale })
        }
    };
    let setup = Setup {
        config,
        target,
        beta,
        test_x,
        embedding,
        n_eps,
    };
    let mut cells = map_indices(exec, n_x * n_theta, |idx| setup.cell(idx / n_theta, idx % n_theta))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?
        .into_iter();
    let outers: Vec<Outer> = (0..n_x).map(|_| outer(cells.by_ref().take(n_theta).collect())).collect();

    let all: Vec<&Outer> = outers.iter().collect();
    let estimate = combine(&all, &setup.target, n_theta, n_eps);
    let std_error = if n_x >= 3 {
        let loo: Vec<ErrorDecomposition> = (0..n_x)
            .map(|drop| {
                let kept: Vec<&Outer> = all.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, o)| *o).collect();
                combine(&kept, &setup.target, n_theta, n_eps)
            })
            .collect();
        let jack = |get: fn(&ErrorDecomposition) -> f64| {
            let n = n_x as f64;
            let mean = loo.iter().map(get).sum::<f64>() / n;
            ((n - 1.0) / n * loo.iter().map(|d| (get(d) - mean).powi(2)).sum::<f64>()).sqrt()
        };
        ErrorDecomposition {
            noise: jack(|d| d.noise),
            init: jack(|d| d.init),
            samp: jack(|d| d.samp),
            bias: jack(|d| d.bias),
            total: jack(|d| d.total),
        }
    } else {
        ErrorDecomposition {
            noise: f64::NAN,
            init: f64::NAN,
            samp: f64::NAN,
            bias: f64::NAN,
            total: f64::NAN,
        }
    };
    Ok(DecompositionEstimate {
        estimate,
        std_error,
        n_x,
        n_theta,
        n_eps,
        seed: config.seed,
    })
}
