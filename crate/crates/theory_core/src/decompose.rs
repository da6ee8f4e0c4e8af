use crate::{psi_terms, ModelParams, PsiSet, TheoryError};

/// Test error split into noise, initialization and sampling variances plus
/// the bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorDecomposition {
    pub noise: f64,
    pub init: f64,
    pub samp: f64,
    pub bias: f64,
    pub total: f64,
}

fn check_k(k: u64) -> Result<f64, TheoryError> {
    if k == 0 {
        Err(TheoryError::InvalidArgument("K must be >= 1".into()))
    } else {
        Ok(k as f64)
    }
}

/// Decomposition for an ensemble of `k` learners sharing the data.
pub fn decompose_error(psis: &PsiSet, p: &ModelParams, k: u64) -> Result<ErrorDecomposition, TheoryError> {
    let k = check_k(k)?;
    let f2 = p.f * p.f;
    let t2 = p.tau * p.tau;
    let noise = t2 * (psis.psi3_e + (psis.psi3_v - psis.psi3_e) / k);
    let init = f2 / k * (psis.psi2_v - psis.psi2_e);
    let samp = f2 * (psis.psi2_e - psis.psi2_d);
    let bias = f2 * (1.0 - 2.0 * psis.psi1_term + psis.psi2_d);
    Ok(ErrorDecomposition {
        noise,
        init,
        samp,
        bias,
        total: noise + init + samp + bias + p.tau_test * p.tau_test,
    })
}

/// Test error of `k` learners averaged on the same data; affine in `1/k`.
pub fn ensemble_error(psis: &PsiSet, p: &ModelParams, k: u64) -> Result<f64, TheoryError> {
    let k = check_k(k)?;
    let f2 = p.f * p.f;
    let t2 = p.tau * p.tau;
    Ok(f2 * (1.0 - 2.0 * psis.psi1_term)
        + (f2 * psis.psi2_v + t2 * psis.psi3_v) / k
        + (1.0 - 1.0 / k) * (f2 * psis.psi2_e + t2 * psis.psi3_e))
}

/// Test error of `k` learners each trained on a disjoint `1/k` share of
/// the data. Every trace is evaluated at `psi2 / k`.
pub fn divide_conquer_error(p: &ModelParams, k: u64) -> Result<f64, TheoryError> {
    let kf = check_k(k)?;
    let split = p.with_psi2(p.psi2 / kf);
    let psis = psi_terms(&split)?;
    let f2 = p.f * p.f;
    let t2 = p.tau * p.tau;
    Ok(f2 * (1.0 - 2.0 * psis.psi1_term)
        + (f2 * psis.psi2_v + t2 * psis.psi3_v) / kf
        + (1.0 - 1.0 / kf) * f2 * psis.psi2_d)
}

/// Grid minimization of [`ensemble_error`] over `lambda`.
///
/// Points whose saddle fails are skipped; ties go to the smaller `lambda`.
pub fn optimal_lambda(p: &ModelParams, k: u64, grid: &[f64]) -> Result<(f64, f64), TheoryError> {
    if grid.is_empty() {
        return Err(TheoryError::InvalidArgument("lambda grid is empty".into()));
    }
    check_k(k)?;
    let mut best: Option<(f64, f64)> = None;
    for &lambda in grid {
        let q = p.with_lambda(lambda);
        let err = match psi_terms(&q).and_then(|s| ensemble_error(&s, &q, k)) {
            Ok(e) => e,
            Err(e) => {
                log::warn!("skipping lambda={lambda}: {e}");
                continue;
            }
        };
        best = match best {
            Some((bl, be)) if be < err || (be == err && bl <= lambda) => Some((bl, be)),
            _ => Some((lambda, err)),
        };
    }
    best.ok_or(TheoryError::Saddle { best_residual: f64::NAN })
}
