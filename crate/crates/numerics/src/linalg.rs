//! Dense solves. No explicit inverses.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::NumericsError;

/// Condition estimate above which a system is refused.
pub const MAX_CONDITION: f64 = 1e14;

/// Spectral condition number from the singular values.
fn condition(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Returns `A^{-1} B` using a partially pivoted LU factorization.
///
/// Intended for the small systems of the Hessian-trace formulas; the
/// condition estimate is computed from the singular values of `A`.
pub fn solve_symmetric(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>, NumericsError> {
    if !a.is_square() || a.nrows() != b.nrows() {
        return Err(NumericsError::Dimension(format!(
            "A is {}x{}, B is {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    let cond = condition(a);
    if !(cond <= MAX_CONDITION) {
        return Err(NumericsError::Singular { condition: cond });
    }
    a.clone()
        .lu()
        .solve(b)
        .ok_or(NumericsError::Singular { condition: cond })
}

/// Cholesky factorization of `G + cI`, reusable across right-hand sides.
pub struct RidgeSystem {
    chol: Cholesky<f64, Dyn>,
}

impl RidgeSystem {
    pub fn new(g: &DMatrix<f64>, c: f64) -> Result<Self, NumericsError> {
        if !g.is_square() {
            return Err(NumericsError::Dimension(format!(
                "Gram matrix is {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
        let mut m = g.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += c;
        }
        match Cholesky::new(m) {
            Some(chol) => Ok(Self { chol }),
            None if c < 0.0 => Err(NumericsError::Indefinite { shift: c }),
            None => {
                let mut m = g.clone();
                for i in 0..m.nrows() {
                    m[(i, i)] += c;
                }
                Err(NumericsError::Singular {
                    condition: condition(&m),
                })
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn solve(&self, v: &DVector<f64>) -> DVector<f64> {
        self.chol.solve(v)
    }

    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.chol.solve(b)
    }
}

/// Returns `(G + cI)^{-1} v`.
pub fn ridge_solve(g: &DMatrix<f64>, c: f64, v: &DVector<f64>) -> Result<DVector<f64>, NumericsError> {
    if g.nrows() != v.len() {
        return Err(NumericsError::Dimension(format!(
            "G is {}x{}, v has {}",
            g.nrows(),
            g.ncols(),
            v.len()
        )));
    }
    Ok(RidgeSystem::new(g, c)?.solve(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(n: usize, m: usize, seed: u64) -> DMatrix<f64> {
        let mut s = seed;
        DMatrix::from_fn(n, m, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
    }

    #[test]
    fn identity_returns_rhs() {
        let b = lcg_matrix(3, 3, 1);
        let x = solve_symmetric(&DMatrix::identity(3, 3), &b).unwrap();
        assert!((x - b).amax() < 1e-15);
    }

    #[test]
    fn scaled_identity() {
        let x = solve_symmetric(&(DMatrix::identity(4, 4) * 2.0), &DMatrix::identity(4, 4)).unwrap();
        assert!((x - DMatrix::identity(4, 4) * 0.5).amax() < 1e-15);
    }

    #[test]
    fn random_spd_multiply_back() {
        let m = lcg_matrix(4, 4, 7);
        let a = &m * m.transpose() + DMatrix::identity(4, 4);
        let b = lcg_matrix(4, 4, 9);
        let x = solve_symmetric(&a, &b).unwrap();
        assert!((&a * x - &b).norm() <= 1e-10 * b.norm());
    }

    #[test]
    fn singular_carries_condition() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        match solve_symmetric(&a, &DMatrix::identity(2, 2)) {
            Err(NumericsError::Singular { condition }) => assert!(condition > MAX_CONDITION),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ridge_trivial_cases() {
        let v = DVector::from_vec(vec![1.0, -2.0, 3.0]);
        let x = ridge_solve(&DMatrix::zeros(3, 3), 1.0, &v).unwrap();
        assert!((x - &v).amax() < 1e-15);
        let x = ridge_solve(&DMatrix::identity(3, 3), 1.0, &v).unwrap();
        assert!((x - &v * 0.5).amax() < 1e-15);
    }

    #[test]
    fn ridge_random_100() {
        let z = lcg_matrix(80, 100, 3);
        let g = z.transpose() * &z;
        let v = DVector::from_iterator(100, lcg_matrix(100, 1, 5).iter().copied());
        let c = 1e-3;
        let x = ridge_solve(&g, c, &v).unwrap();
        let resid = (&g * &x + &x * c) - &v;
        assert!(resid.norm() <= 1e-9 * v.norm());
    }

    #[test]
    fn ridge_negative_shift_indefinite() {
        let err = ridge_solve(&DMatrix::zeros(2, 2), -1.0, &DVector::zeros(2)).unwrap_err();
        assert!(matches!(err, NumericsError::Indefinite { .. }));
    }
}
