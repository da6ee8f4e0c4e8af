//! Source terms whose Hessians, contracted with the inverse action Hessian,
//! give the order-parameter traces.
//!
//! Each source is `S_t * sigma / 4`: `S_t` couples the overlap of the two
//! copies to the readout, `sigma` collects the response of the data term.
//! Both vanish at zero overlap, so only their mixed second derivatives
//! survive at the saddle.

use nalgebra::Matrix2;

use crate::{ModelParams, TheoryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PsiKind {
    Psi1,
    Psi2Vanilla,
    Psi3Vanilla,
    Psi2Ensemble,
    Psi3Ensemble,
    Psi2Divide,
}

impl PsiKind {
    pub const ALL: [PsiKind; 6] = [
        PsiKind::Psi1,
        PsiKind::Psi2Vanilla,
        PsiKind::Psi3Vanilla,
        PsiKind::Psi2Ensemble,
        PsiKind::Psi3Ensemble,
        PsiKind::Psi2Divide,
    ];
}

fn pair(d: f64, o: f64) -> Matrix2<f64> {
    Matrix2::new(d, o, o, d)
}

fn shifted_inverse(c: &Matrix2<f64>) -> Result<Matrix2<f64>, TheoryError> {
    let a = Matrix2::identity() + c;
    if !(a.determinant() > 0.0) {
        return Err(TheoryError::Domain("I + C must be positive definite"));
    }
    a.try_inverse().ok_or(TheoryError::Domain("I + C is singular"))
}

/// Value of the source term for `kind` at `(q, r, qt, rt)`.
///
/// For [`PsiKind::Psi1`] the overlaps are ignored and the value at the
/// saddle is the trace itself.
pub fn prefactor(
    kind: PsiKind,
    q: f64,
    r: f64,
    qt: f64,
    rt: f64,
    p: &ModelParams,
) -> Result<f64, TheoryError> {
    let (psi1, psi2) = (p.psi1, p.psi2);
    let mu1_sq = p.moments.mu1 * p.moments.mu1;
    let ms = p.moments.mu_star_sq;
    let a = 1.0 + mu1_sq * psi1 * r;
    if !(a > 0.0) {
        return Err(TheoryError::Domain("1 + mu1^2 psi1 r must be positive"));
    }
    let c = mu1_sq * psi1 * r + ms * psi1 * q;
    if !(1.0 + c > 0.0) {
        return Err(TheoryError::Domain("1 + mu1^2 psi1 r + mu*^2 psi1 q must be positive"));
    }

    let rmat = pair(r, rt);
    let (coupling, cmat) = match kind {
        PsiKind::Psi1 => return Ok(psi1 * psi2 * mu1_sq * r / (1.0 + c)),
        PsiKind::Psi2Vanilla | PsiKind::Psi3Vanilla => (
            2.0 * psi1 * (mu1_sq * rt + ms * qt),
            rmat * (mu1_sq * psi1) + pair(q, qt) * (ms * psi1),
        ),
        PsiKind::Psi2Ensemble | PsiKind::Psi3Ensemble => (
            2.0 * psi1 * mu1_sq * rt,
            rmat * (mu1_sq * psi1) + Matrix2::identity() * (ms * psi1 * q),
        ),
        PsiKind::Psi2Divide => (2.0 * psi1 * mu1_sq * rt, Matrix2::identity() * c),
    };
    let inv = shifted_inverse(&cmat)?;
    let feature = 2.0 * psi2 * (cmat * inv)[(0, 1)];
    let data = 2.0 * psi2 * psi2 * mu1_sq * psi1 * (inv * rmat * inv)[(0, 1)];
    let response = match kind {
        PsiKind::Psi3Vanilla | PsiKind::Psi3Ensemble => feature,
        PsiKind::Psi2Vanilla | PsiKind::Psi2Ensemble => feature + data,
        PsiKind::Psi2Divide => data,
        PsiKind::Psi1 => unreachable!(),
    };
    Ok(0.25 * coupling * response)
}
