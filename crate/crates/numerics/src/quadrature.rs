//! Gauss rules for the standard normal measure.
//!
//! [`gauss_hermite`] is the classical rule on the real line. Integrands with a
//! kink at the origin (ReLU, absolute value) converge only algebraically under
//! it, so [`gauss_half_hermite`] provides the Gauss rule for the half-normal
//! weight on `[0, inf)`; splitting an expectation at zero and applying it on
//! each side restores spectral accuracy for such integrands.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::NumericsError;

/// Nodes and weights for expectations against a probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Approximates `E[f(u)]`.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Orthonormal probabilists' Hermite values `(p_n(x), p_{n-1}(x))`.
fn hermite_pair(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Gauss rule from the three-term recurrence of the orthonormal polynomials
/// (Golub-Welsch). `diag` holds the alpha coefficients and `off` the
/// square roots of the beta coefficients.
fn golub_welsch(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = diag[i];
        if i + 1 < n {
            jac[(i, i + 1)] = off[i];
            jac[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn normalized(nodes: Vec<f64>, weights: Vec<f64>) -> Quadrature {
    let total: f64 = weights.iter().sum();
    Quadrature {
        nodes,
        weights: weights.into_iter().map(|w| w / total).collect(),
    }
}

/// Gauss-Hermite rule for `u ~ N(0, 1)`, exact for polynomials of degree
/// up to `2 * order - 1`.
///
/// Eigenvalues of the Jacobi matrix seed a Newton polish on the orthonormal
/// recurrence; weights come from `1 / (n p_{n-1}(x)^2)`.
pub fn gauss_hermite(order: usize) -> Result<Quadrature, NumericsError> {
    if order == 0 {
        return Err(NumericsError::InvalidArgument(
            "quadrature order must be at least 1".into(),
        ));
    }
    let n = order;
    let off: Vec<f64> = (1..n).map(|k| (k as f64).sqrt()).collect();
    let (guess, _) = golub_welsch(&vec![0.0; n], &off);

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut x in guess {
        for _ in 0..10 {
            let (pn, pm) = hermite_pair(n, x);
            let dx = pn / ((n as f64).sqrt() * pm);
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, pm) = hermite_pair(n, x);
        nodes.push(x);
        weights.push(1.0 / (n as f64 * pm * pm));
    }

    // enforce the symmetry of the rule exactly
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(normalized(nodes, weights))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let k = k as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        })
        .collect();
    let (x, w) = golub_welsch(&vec![0.0; n], &off);
    (x, w.into_iter().map(|w| 2.0 * w).collect())
}

/// Gauss rule for the half-normal law of `|u|`, `u ~ N(0, 1)`.
///
/// The recurrence is obtained by a Lanczos run (with full
/// re-orthogonalization) on a fine composite Gauss-Legendre discretization of
/// the weight `2 phi(u)` over `[0, 40]`; the tail beyond is below `1e-300`.
pub fn gauss_half_hermite(order: usize) -> Result<Quadrature, NumericsError> {
    if order == 0 {
        return Err(NumericsError::InvalidArgument(
            "quadrature order must be at least 1".into(),
        ));
    }
    const PANEL: f64 = 0.5;
    const PANELS: usize = 80;
    const POINTS: usize = 40;
    let (gx, gw) = gauss_legendre(POINTS);
    let norm = (2.0 / std::f64::consts::PI).sqrt();
    let mut xs = Vec::with_capacity(PANELS * POINTS);
    let mut ws = Vec::with_capacity(PANELS * POINTS);
    for p in 0..PANELS {
        let mid = (p as f64 + 0.5) * PANEL;
        for (&t, &w) in gx.iter().zip(&gw) {
            let x = mid + 0.5 * PANEL * t;
            xs.push(x);
            ws.push(0.5 * PANEL * w * norm * (-0.5 * x * x).exp());
        }
    }
    let m = xs.len();
    if order > m / 4 {
        return Err(NumericsError::InvalidArgument(format!(
            "half-line rule supports order up to {}",
            m / 4
        )));
    }
    let sqrt_w: Vec<f64> = ws.iter().map(|w| w.sqrt()).collect();
    let mass: f64 = ws.iter().sum();

    // Lanczos in the weighted l2 space: vectors hold sqrt(w_j) p_k(x_j)
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order);
    let mut alpha = Vec::with_capacity(order);
    let mut beta = Vec::with_capacity(order);
    let mut v: Vec<f64> = sqrt_w.iter().map(|s| s / mass.sqrt()).collect();
    for k in 0..order {
        let mut u: Vec<f64> = v.iter().zip(&xs).map(|(a, x)| a * x).collect();
        let a: f64 = u.iter().zip(&v).map(|(p, q)| p * q).sum();
        alpha.push(a);
        for (ui, vi) in u.iter_mut().zip(&v) {
            *ui -= a * vi;
        }
        if k > 0 {
            let b = beta[k - 1];
            for (ui, pi) in u.iter_mut().zip(&basis[k - 1]) {
                *ui -= b * pi;
            }
        }
        basis.push(v);
        for prev in basis.iter() {
            let c: f64 = u.iter().zip(prev).map(|(p, q)| p * q).sum();
            for (ui, pi) in u.iter_mut().zip(prev) {
                *ui -= c * pi;
            }
        }
        let b = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        beta.push(b);
        v = u.into_iter().map(|x| x / b).collect();
    }
    let (nodes, weights) = golub_welsch(&alpha, &beta[..order - 1]);
    Ok(normalized(nodes, weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_factorial(k: u32) -> f64 {
        (1..=k).rev().step_by(2).map(f64::from).product()
    }

    #[test]
    fn order_one_is_the_mean() {
        let q = gauss_hermite(1).unwrap();
        assert_eq!(q.nodes, vec![0.0]);
        assert!((q.weights[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn order_two_has_unit_variance() {
        let q = gauss_hermite(2).unwrap();
        assert!((q.expect(|u| u * u) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_order_is_rejected() {
        assert!(gauss_hermite(0).is_err());
        assert!(gauss_half_hermite(0).is_err());
    }

    #[test]
    fn moments_up_to_eight() {
        for order in [20, 40, 80, 120] {
            let q = gauss_hermite(order).unwrap();
            assert!((q.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(q.nodes.windows(2).all(|w| w[0] < w[1]));
            for k in 0..=8u32 {
                let exact = if k % 2 == 1 { 0.0 } else { double_factorial(k.saturating_sub(1)) };
                let got = q.expect(|u| u.powi(k as i32));
                assert!((got - exact).abs() < 1e-10, "order {order} k {k}: {got}");
            }
        }
    }

    #[test]
    fn exact_to_degree_2n_minus_1() {
        let q = gauss_hermite(5).unwrap();
        // E[u^8] = 105 needs degree 8 <= 9
        assert!((q.expect(|u| u.powi(8)) - 105.0).abs() < 1e-10);
    }

    #[test]
    fn half_rule_moments() {
        let q = gauss_half_hermite(40).unwrap();
        let c = (2.0 / std::f64::consts::PI).sqrt();
        // E|u| = sqrt(2/pi), E|u|^2 = 1, E|u|^3 = 2 sqrt(2/pi)
        assert!((q.expect(|u| u) - c).abs() < 1e-13);
        assert!((q.expect(|u| u * u) - 1.0).abs() < 1e-13);
        assert!((q.expect(|u| u.powi(3)) - 2.0 * c).abs() < 1e-12);
        assert!(q.nodes.iter().all(|&x| x > 0.0));
    }

    #[test]
    fn split_rule_integrates_a_kink() {
        let q = gauss_half_hermite(40).unwrap();
        // E[max(0,u)] = 0.5 E|u| under the split rule
        let relu_mean = 0.5 * q.expect(|u| u.max(0.0) + (-u).max(0.0));
        let exact = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((relu_mean - exact).abs() < 1e-10);
    }

    #[test]
    fn full_line_rule_is_algebraic_on_a_kink() {
        let q = gauss_hermite(40).unwrap();
        let exact = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        let err = (q.expect(|u| u.max(0.0)) - exact).abs();
        assert!(err > 1e-4 && err < 1e-2, "{err}");
    }
}
