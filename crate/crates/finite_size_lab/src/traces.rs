use nalgebra::DMatrix;
use rf_numerics::RidgeSystem;
use rf_theory::PsiSet;

use crate::data::draw_gaussian_matrix;
use crate::exec::{map_indices, Execution};
use crate::learner::ridge_shift;
use crate::{featurize, seed, LabError, Learner, Model, SimConfig};

/// How the second learner sharing the dataset is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceMode {
    /// Fresh `Theta` and `W`.
    #[default]
    Independent,
    /// A copy of the first learner, so the ensemble traces collapse onto the
    /// single-learner ones.
    Degenerate,
}

/// Seed-averaged finite-size traces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiEstimate {
    pub mean: PsiSet,
    pub std_error: PsiSet,
    pub n_seeds: usize,
}

/// Resolvent products of one learner on one design.
struct Resolved {
    theta: DMatrix<f64>,
    /// `(Z^T Z + c I)^{-1} Z^T`, P x N.
    y: DMatrix<f64>,
    /// `y X / sqrt(D)`, P x D.
    a: DMatrix<f64>,
    /// `Theta^T a`, D x D.
    ta: DMatrix<f64>,
    /// `Theta^T y`, D x N.
    ty: DMatrix<f64>,
}

fn resolve(learner: Learner, x: &DMatrix<f64>, config: &SimConfig) -> Result<Resolved, LabError> {
    let z = featurize(&learner, x, config)?;
    let sys = RidgeSystem::new(&z.tr_mul(&z), ridge_shift(config, x.nrows()))?;
    let y = sys.solve_matrix(&z.transpose());
    let a = &y * x / (config.d as f64).sqrt();
    let ta = learner.theta.tr_mul(&a);
    let ty = learner.theta.tr_mul(&y);
    Ok(Resolved {
        theta: learner.theta,
        y,
        a,
        ta,
        ty,
    })
}

/// The six traces for one independent draw of data and learners.
///
/// Learners one and two share `X`; learner three is trained on an
/// independent design and enters only the divide-and-conquer trace.
pub fn psi_traces_single(config: &SimConfig, index: u64, mode: TraceMode) -> Result<PsiSet, LabError> {
    config.validate()?;
    if config.model != Model::GaussianCovariate {
        return Err(LabError::Unsupported("trace estimates need Gaussian covariates"));
    }
    let base = [seed::TRACE, index];
    let sub = |tag: u64, k: u64| seed::stream(config.seed, &[base[0], base[1], tag, k]);
    let (n, d) = (config.n, config.d);
    let x = draw_gaussian_matrix(n, d, &mut sub(seed::INPUTS, 0));
    let x_other = draw_gaussian_matrix(n, d, &mut sub(seed::INPUTS, 1));
    let first = Learner::draw(config, n, &mut sub(seed::FEATURES, 1));
    let second = match mode {
        TraceMode::Independent => Learner::draw(config, n, &mut sub(seed::FEATURES, 2)),
        TraceMode::Degenerate => first.clone(),
    };
    let third = Learner::draw(config, n, &mut sub(seed::FEATURES, 3));
    let r1 = resolve(first, &x, config)?;
    let r2 = resolve(second, &x, config)?;
    let r3 = resolve(third, &x_other, config)?;

    let m = config.activation.moments();
    let (mu1_sq, star_sq) = (m.mu1 * m.mu1, m.mu_star_sq);
    let df = d as f64;
    let lin = mu1_sq / (df * df);
    // covariate noise is shared only when the learners are the same object
    let shared_star = match mode {
        TraceMode::Independent => 0.0,
        TraceMode::Degenerate => star_sq / df,
    };
    Ok(PsiSet {
        psi1_term: m.mu1 * r1.a.dot(&r1.theta) / df.powf(1.5),
        psi2_v: lin * r1.ta.norm_squared() + star_sq / df * r1.a.norm_squared(),
        psi3_v: lin * r1.ty.norm_squared() + star_sq / df * r1.y.norm_squared(),
        psi2_e: lin * r1.ta.dot(&r2.ta) + shared_star * r1.a.dot(&r2.a),
        psi3_e: lin * r1.ty.dot(&r2.ty) + shared_star * r1.y.dot(&r2.y),
        psi2_d: lin * r1.ta.dot(&r3.ta),
    })
}

/// Averages [`psi_traces_single`] over `n_seeds` independent draws.
pub fn estimate_psi_traces(
    config: &SimConfig,
    n_seeds: usize,
    mode: TraceMode,
    exec: Execution,
) -> Result<PsiEstimate, LabError> {
    if n_seeds < 2 {
        return Err(LabError::Config("need at least two seeds for a standard error".into()));
    }
    let draws = map_indices(exec, n_seeds, |s| psi_traces_single(config, s as u64, mode))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let n = n_seeds as f64;
    let mean = PsiSet::from_fn(|k| draws.iter().map(|p| p.get(k)).sum::<f64>() / n);
    let std_error = PsiSet::from_fn(|k| {
        let mu = mean.get(k);
        let var = draws.iter().map(|p| (p.get(k) - mu).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    });
    Ok(PsiEstimate {
        mean,
        std_error,
        n_seeds,
    })
}
