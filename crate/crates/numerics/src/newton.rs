//! Damped Newton iteration for square nonlinear systems.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq)]
pub struct RootResult {
    pub solution: DVector<f64>,
    /// Infinity norm of the residual at `solution`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Why the iteration stopped when it did not converge.
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings tried before giving up on a direction.
    pub max_halvings: usize,
    /// Relative step for the finite-difference Jacobian.
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
            max_halvings: 30,
            fd_step: 1e-7,
        }
    }
}

impl NewtonOptions {
    pub fn with_tol(tol: f64, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            ..Self::default()
        }
    }
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn all_finite(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn fd_jacobian<F>(f: &F, x: &DVector<f64>, fx: &DVector<f64>, rel: f64) -> DMatrix<f64>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let n = x.len();
    let mut jac = DMatrix::zeros(fx.len(), n);
    for j in 0..n {
        let h = rel * x[j].abs().max(1.0);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let col = (f(&xp) - f(&xm)) / (2.0 * h);
        jac.set_column(j, &col);
    }
    jac
}

/// Solves `f(x) = 0` by Newton steps with backtracking on the residual norm.
///
/// Without an explicit Jacobian, central differences are used. Singular
/// Jacobians, NaNs and stalled line searches all end in `converged = false`
/// with a diagnostic; the function never panics on bad input values.
pub fn newton_solve<F>(
    f: F,
    jacobian: Option<&dyn Fn(&DVector<f64>) -> DMatrix<f64>>,
    x0: &DVector<f64>,
    opts: NewtonOptions,
) -> RootResult
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
{
    let mut x = x0.clone();
    let mut fx = f(&x);
    let stop = |x: DVector<f64>, fx: &DVector<f64>, it: usize, why: &str| RootResult {
        residual_norm: if all_finite(fx) { inf_norm(fx) } else { f64::NAN },
        solution: x,
        iterations: it,
        converged: false,
        diagnostic: Some(why.to_string()),
    };
    if !all_finite(&fx) {
        return stop(x, &fx, 0, "non-finite residual at the initial point");
    }
    for it in 0..=opts.max_iter {
        let res = inf_norm(&fx);
        if res <= opts.tol {
            return RootResult {
                solution: x,
                residual_norm: res,
                iterations: it,
                converged: true,
                diagnostic: None,
            };
        }
        if it == opts.max_iter {
            break;
        }
        let jac = match jacobian {
            Some(j) => j(&x),
            None => fd_jacobian(&f, &x, &fx, opts.fd_step),
        };
        if !jac.iter().all(|v| v.is_finite()) {
            return stop(x, &fx, it, "non-finite Jacobian");
        }
        let Some(dx) = jac.lu().solve(&(-&fx)) else {
            return stop(x, &fx, it, "singular Jacobian");
        };
        if !all_finite(&dx) {
            return stop(x, &fx, it, "singular Jacobian");
        }
        let base = fx.norm();
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            let xn = &x + t * &dx;
            let fnew = f(&xn);
            if all_finite(&fnew) && fnew.norm() < base {
                accepted = Some((xn, fnew));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((xn, fnew)) => {
                x = xn;
                fx = fnew;
            }
            None => return stop(x, &fx, it, "line search failed to reduce the residual"),
        }
    }
    stop(x, &fx, opts.max_iter, "iteration limit reached")
}
