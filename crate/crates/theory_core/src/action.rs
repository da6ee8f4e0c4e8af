//! The replica action `S0` and its two-copy extensions.
//!
//! Order parameters come in pairs: a diagonal value `(q, r)` shared by both
//! copies and an off-diagonal overlap `(qt, rt)`. The Hessian of an action in
//! the overlap directions at zero overlap is what the trace formulas need.

use crate::{ModelParams, TheoryError};

fn check_positive(q: f64, r: f64) -> Result<(), TheoryError> {
    if !(q > 0.0) {
        return Err(TheoryError::Domain("q must be positive"));
    }
    if !(r > 0.0) {
        return Err(TheoryError::Domain("r must be positive"));
    }
    Ok(())
}

/// `S0(q, r)`.
pub fn action_s0(q: f64, r: f64, p: &ModelParams) -> Result<f64, TheoryError> {
    check_positive(q, r)?;
    let (psi1, psi2) = (p.psi1, p.psi2);
    let mu1_sq = p.moments.mu1 * p.moments.mu1;
    let ms = p.moments.mu_star_sq;
    let a = 1.0 + mu1_sq * psi1 * r;
    if !(a > 0.0) {
        return Err(TheoryError::Domain("log(1 + mu1^2 psi1 r)"));
    }
    let inner = 1.0 + ms * psi1 * q / a;
    if !(inner > 0.0) {
        return Err(TheoryError::Domain("log(1 + mu*^2 psi1 q / (1 + mu1^2 psi1 r))"));
    }
    Ok(p.lambda * psi1 * psi1 * psi2 * q
        + psi2 * inner.ln()
        + r / q
        + (1.0 - psi1) * q.ln()
        + psi2 * a.ln()
        - r.ln())
}

/// `(dS0/dq, dS0/dr)`.
pub fn s0_gradient(q: f64, r: f64, p: &ModelParams) -> (f64, f64) {
    let (psi1, psi2) = (p.psi1, p.psi2);
    let mu1_sq = p.moments.mu1 * p.moments.mu1;
    let ms = p.moments.mu_star_sq;
    let a = 1.0 + mu1_sq * psi1 * r;
    let b = a + ms * psi1 * q;
    let dq = p.lambda * psi1 * psi1 * psi2 + ms * psi1 * psi2 / b + (1.0 - psi1) / q - r / (q * q);
    let dr = -ms * mu1_sq * psi1 * psi1 * psi2 * q / (a * b) + mu1_sq * psi1 * psi2 / a + 1.0 / q
        - 1.0 / r;
    (dq, dr)
}

/// Two copies sharing data and features: `S0(q+qt, r+rt) + S0(q-qt, r-rt)`.
pub fn action_vanilla(q: f64, r: f64, qt: f64, rt: f64, p: &ModelParams) -> Result<f64, TheoryError> {
    Ok(action_s0(q + qt, r + rt, p)? + action_s0(q - qt, r - rt, p)?)
}

/// Overlap curvatures `(f, g)` of two learners sharing the data.
pub fn ensemble_curvature(q: f64, r: f64, p: &ModelParams) -> (f64, f64) {
    let psi1 = p.psi1;
    let mu1_sq = p.moments.mu1 * p.moments.mu1;
    let ms = p.moments.mu_star_sq;
    let aq = 1.0 + q * ms * psi1;
    let den = 1.0 + r * mu1_sq * psi1 + q * ms * psi1;
    let f = (2.0 * r * mu1_sq * psi1 * aq + aq * aq
        - r * r * mu1_sq * mu1_sq * psi1 * psi1 * (p.psi2 - 1.0))
        / (r * r * den * den);
    (f, psi1 / (q * q))
}

/// Overlap curvatures `(f, g)` of two learners on independent data.
pub fn divide_curvature(q: f64, r: f64, p: &ModelParams) -> (f64, f64) {
    (1.0 / (r * r), p.psi1 / (q * q))
}

pub fn action_ensemble(q: f64, r: f64, qt: f64, rt: f64, p: &ModelParams) -> Result<f64, TheoryError> {
    let s0 = action_s0(q, r, p)?;
    let (f, g) = ensemble_curvature(q, r, p);
    Ok(s0 + rt * rt * f + qt * qt * g)
}

pub fn action_divide(q: f64, r: f64, qt: f64, rt: f64, p: &ModelParams) -> Result<f64, TheoryError> {
    let s0 = action_s0(q, r, p)?;
    let (f, g) = divide_curvature(q, r, p);
    Ok(s0 + rt * rt * f + qt * qt * g)
}
