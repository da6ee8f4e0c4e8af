use nalgebra::DVector;
use rf_numerics::{newton_solve, NewtonOptions, RootResult};

use crate::{action::s0_gradient, ModelParams, TheoryError};

/// Convergence threshold on the log-scaled gradient `(q dS0/dq, r dS0/dr)`.
pub const SADDLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlePoint {
    pub q: f64,
    pub r: f64,
    /// `max(|dS0/dq|, |dS0/dr|)` at `(q, r)`.
    pub grad_norm: f64,
    /// `max(|q dS0/dq|, |r dS0/dr|)`, the quantity the solver drives to zero.
    pub scaled_residual: f64,
}

const PRIMARY_STARTS: [f64; 3] = [0.1, 1.0, 10.0];
const WIDE_Q: [f64; 9] = [1e-6, 1e-4, 1e-2, 0.1, 1.0, 1e2, 1e3, 1e4, 1e5];
const WIDE_R: [f64; 8] = [1e-6, 1e-3, 0.1, 1.0, 1e2, 1e3, 1e4, 1e5];

fn scaled_residual(y: &DVector<f64>, p: &ModelParams) -> DVector<f64> {
    let (q, r) = (y[0].exp(), y[1].exp());
    let (dq, dr) = s0_gradient(q, r, p);
    DVector::from_vec(vec![q * dq, r * dr])
}

fn attempt(p: &ModelParams, q0: f64, r0: f64) -> RootResult {
    let f = |y: &DVector<f64>| scaled_residual(y, p);
    let y0 = DVector::from_vec(vec![q0.ln(), r0.ln()]);
    let first = newton_solve(f, None, &y0, NewtonOptions::with_tol(SADDLE_TOL, 200));
    if !first.converged {
        return first;
    }
    // a few extra steps push the residual to its rounding floor
    let polish = newton_solve(f, None, &first.solution, NewtonOptions::with_tol(1e-15, 3));
    if polish.residual_norm < first.residual_norm {
        RootResult { converged: true, ..polish }
    } else {
        first
    }
}

/// Stationary point of `S0` in log coordinates.
///
/// Starts from the 3x3 grid `{0.1, 1, 10}^2` and keeps the first converged
/// run; if none converges a wider grid covering `q` up to `1e5` is tried,
/// which is needed close to the interpolation threshold at small `lambda`.
pub fn solve_saddle(p: &ModelParams) -> Result<SaddlePoint, TheoryError> {
    p.validate()?;
    let mut best = f64::INFINITY;
    let primary = PRIMARY_STARTS
        .iter()
        .flat_map(|&q| PRIMARY_STARTS.iter().map(move |&r| (q, r)));
    let wide = WIDE_Q.iter().flat_map(|&q| WIDE_R.iter().map(move |&r| (q, r)));
    for (q0, r0) in primary.chain(wide) {
        let res = attempt(p, q0, r0);
        if res.converged {
            let (q, r) = (res.solution[0].exp(), res.solution[1].exp());
            let (dq, dr) = s0_gradient(q, r, p);
            return Ok(SaddlePoint {
                q,
                r,
                grad_norm: dq.abs().max(dr.abs()),
                scaled_residual: res.residual_norm,
            });
        }
        if res.residual_norm.is_finite() {
            best = best.min(res.residual_norm);
        }
    }
    log::warn!(
        "saddle search failed at psi1={} psi2={} lambda={}",
        p.psi1,
        p.psi2,
        p.lambda
    );
    Err(TheoryError::Saddle { best_residual: best })
}
