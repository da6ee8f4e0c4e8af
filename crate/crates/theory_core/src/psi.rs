use rf_numerics::{fd_hessian, solve_symmetric, DEFAULT_FD_STEP};

use crate::{
    action_divide, action_ensemble, action_vanilla, prefactor, solve_saddle, ModelParams, PsiKind,
    SaddlePoint, TheoryError,
};

/// The six asymptotic traces entering every error formula.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PsiSet {
    pub psi1_term: f64,
    pub psi2_v: f64,
    pub psi3_v: f64,
    pub psi2_e: f64,
    pub psi3_e: f64,
    pub psi2_d: f64,
}

impl PsiSet {
    pub fn get(&self, kind: PsiKind) -> f64 {
        match kind {
            PsiKind::Psi1 => self.psi1_term,
            PsiKind::Psi2Vanilla => self.psi2_v,
            PsiKind::Psi3Vanilla => self.psi3_v,
            PsiKind::Psi2Ensemble => self.psi2_e,
            PsiKind::Psi3Ensemble => self.psi3_e,
            PsiKind::Psi2Divide => self.psi2_d,
        }
    }

    pub fn set(&mut self, kind: PsiKind, value: f64) {
        match kind {
            PsiKind::Psi1 => self.psi1_term = value,
            PsiKind::Psi2Vanilla => self.psi2_v = value,
            PsiKind::Psi3Vanilla => self.psi3_v = value,
            PsiKind::Psi2Ensemble => self.psi2_e = value,
            PsiKind::Psi3Ensemble => self.psi3_e = value,
            PsiKind::Psi2Divide => self.psi2_d = value,
        }
    }

    pub fn from_fn(mut f: impl FnMut(PsiKind) -> f64) -> Self {
        let mut out = Self::default();
        for kind in PsiKind::ALL {
            out.set(kind, f(kind));
        }
        out
    }
}

type Action = fn(f64, f64, f64, f64, &ModelParams) -> Result<f64, TheoryError>;

/// `Tr[H[S]^{-1} H[P]]` at `(q*, r*, 0, 0)`.
///
/// Derivatives are taken in relative coordinates
/// `(q*(1+u0), r*(1+u1), q* u2, r* u3)`. The trace is invariant under this
/// linear change of variables, and the unit scale keeps the finite-difference
/// steps matched to the size of each order parameter.
fn hessian_trace(
    action: Action,
    kind: PsiKind,
    s: &SaddlePoint,
    p: &ModelParams,
) -> Result<f64, TheoryError> {
    let (q, r) = (s.q, s.r);
    let at = |u: &[f64]| (q * (1.0 + u[0]), r * (1.0 + u[1]), q * u[2], r * u[3]);
    let origin = [0.0; 4];
    let hs = fd_hessian(
        |u| {
            let (a, b, c, d) = at(u);
            action(a, b, c, d, p).unwrap_or(f64::NAN)
        },
        &origin,
        DEFAULT_FD_STEP,
    )?;
    let hp = fd_hessian(
        |u| {
            let (a, b, c, d) = at(u);
            prefactor(kind, a, b, c, d, p).unwrap_or(f64::NAN)
        },
        &origin,
        DEFAULT_FD_STEP,
    )?;
    Ok(solve_symmetric(&hs, &hp)?.trace())
}

/// Evaluates the six traces at a known saddle point.
pub fn psi_terms_at(p: &ModelParams, s: &SaddlePoint) -> Result<PsiSet, TheoryError> {
    let psi1_term = prefactor(PsiKind::Psi1, s.q, s.r, 0.0, 0.0, p)?;
    Ok(PsiSet {
        psi1_term,
        psi2_v: hessian_trace(action_vanilla, PsiKind::Psi2Vanilla, s, p)?,
        psi3_v: hessian_trace(action_vanilla, PsiKind::Psi3Vanilla, s, p)?,
        psi2_e: hessian_trace(action_ensemble, PsiKind::Psi2Ensemble, s, p)?,
        psi3_e: hessian_trace(action_ensemble, PsiKind::Psi3Ensemble, s, p)?,
        psi2_d: hessian_trace(action_divide, PsiKind::Psi2Divide, s, p)?,
    })
}

pub fn psi_terms(p: &ModelParams) -> Result<PsiSet, TheoryError> {
    let s = solve_saddle(p)?;
    psi_terms_at(p, &s)
}
