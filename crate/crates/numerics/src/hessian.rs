//! Central-difference Hessians with one level of Richardson extrapolation.

use nalgebra::DMatrix;

use crate::NumericsError;

/// Base relative step: `h_i = step * max(1, |x_i|)`.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

fn probe<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Result<f64, NumericsError> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(NumericsError::NonFinite { point: x.to_vec() })
    }
}

fn central<F: Fn(&[f64]) -> f64>(
    f: &F,
    x: &[f64],
    h: &[f64],
    f0: f64,
) -> Result<DMatrix<f64>, NumericsError> {
    let n = x.len();
    let mut hess = DMatrix::zeros(n, n);
    let mut p = x.to_vec();
    for i in 0..n {
        p[i] = x[i] + h[i];
        let fp = probe(f, &p)?;
        p[i] = x[i] - h[i];
        let fm = probe(f, &p)?;
        p[i] = x[i];
        hess[(i, i)] = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                p[i] = x[i] + si * h[i];
                p[j] = x[j] + sj * h[j];
                let v = probe(f, &p);
                p[i] = x[i];
                p[j] = x[j];
                v
            };
            let fpp = corner(1.0, 1.0)?;
            let fpm = corner(1.0, -1.0)?;
            let fmp = corner(-1.0, 1.0)?;
            let fmm = corner(-1.0, -1.0)?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Hessian of `f` at `x`.
///
/// Second differences at steps `h` and `h/2` are combined as
/// `(4 H(h/2) - H(h)) / 3`, then symmetrized.
pub fn fd_hessian<F>(f: F, x: &[f64], step: f64) -> Result<DMatrix<f64>, NumericsError>
where
    F: Fn(&[f64]) -> f64,
{
    if !(step > 0.0) {
        return Err(NumericsError::InvalidArgument("step must be positive".into()));
    }
    let f0 = probe(&f, x)?;
    let h: Vec<f64> = x.iter().map(|xi| step * xi.abs().max(1.0)).collect();
    let h2: Vec<f64> = h.iter().map(|v| 0.5 * v).collect();
    let coarse = central(&f, x, &h, f0)?;
    let fine = central(&f, x, &h2, f0)?;
    let rich = (fine * 4.0 - coarse) / 3.0;
    Ok((&rich + rich.transpose()) * 0.5)
}
