use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rf_numerics::{
    fd_hessian, newton_solve, ridge_solve, solve_symmetric, NewtonOptions, DEFAULT_FD_STEP,
};

fn matrix(n: usize, m: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, n * m).prop_map(move |v| DMatrix::from_vec(n, m, v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hessian_of_quadratic_form_is_exact(
        a in matrix(4, 4),
        b in prop::collection::vec(-2.0..2.0f64, 4),
        x in prop::collection::vec(-3.0..3.0f64, 4),
    ) {
        let sym = (&a + a.transpose()) * 0.5;
        let f = |v: &[f64]| {
            let v = DVector::from_column_slice(v);
            0.5 * v.dot(&(&sym * &v)) + v.iter().zip(&b).map(|(p, q)| p * q).sum::<f64>()
        };
        // second differences are exact on quadratics, so a coarse step only
        // trades truncation error that is absent for less cancellation
        let h = fd_hessian(f, &x, 1e-2).unwrap();
        let scale = sym.amax().max(1.0);
        prop_assert!((h - &sym).amax() <= 1e-7 * scale);
        let h = fd_hessian(f, &x, DEFAULT_FD_STEP).unwrap();
        prop_assert!((h - &sym).amax() <= 1e-5 * scale);
    }

    #[test]
    fn solve_symmetric_multiply_back(m in matrix(4, 4), b in matrix(4, 3)) {
        let a = &m * m.transpose() + DMatrix::identity(4, 4) * 0.5;
        let x = solve_symmetric(&a, &b).unwrap();
        prop_assert!((&a * x - &b).norm() <= 1e-10 * b.norm().max(1e-300));
    }

    #[test]
    fn ridge_multiply_back(z in matrix(12, 20), v in prop::collection::vec(-1.0..1.0f64, 20), c in 1e-4..10.0f64) {
        let g = z.transpose() * &z;
        let v = DVector::from_vec(v);
        let x = ridge_solve(&g, c, &v).unwrap();
        let r = &g * &x + &x * c - &v;
        prop_assert!(r.norm() <= 1e-9 * v.norm().max(1e-300));
    }

    #[test]
    fn newton_is_bitwise_deterministic(t in 0.5..5.0f64, x0 in 0.2..4.0f64) {
        let f = |x: &DVector<f64>| DVector::from_vec(vec![x[0].powi(3) - t]);
        let a = newton_solve(f, None, &DVector::from_vec(vec![x0]), NewtonOptions::default());
        let b = newton_solve(f, None, &DVector::from_vec(vec![x0]), NewtonOptions::default());
        prop_assert!(a.converged);
        prop_assert_eq!(a.solution[0].to_bits(), b.solution[0].to_bits());
        prop_assert_eq!(a.iterations, b.iterations);
    }
}
