//! Merit functions and acceptance tests for accelerated DR iterates.

use super::problem::Problem;
use super::state::DrState;
use crate::error::SolverError;

/// Which merit guards the accelerated iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeritKind {
    /// `||v - u||`; accept when it does not grow.
    PrimalResidualNorm,
    /// DR envelope; accept on sufficient decrease.
    DrEnvelope,
}

impl MeritKind {
    pub fn evaluate(self, state: &DrState, problem: &dyn Problem) -> f64 {
        match self {
            MeritKind::PrimalResidualNorm => merit_drp(state),
            MeritKind::DrEnvelope => merit_dre(state, problem),
        }
    }
}

/// Primal residual norm `||v - u||`.
pub fn merit_drp(state: &DrState) -> f64 {
    (&state.v - &state.u).norm()
}

/// DR envelope in its simplified form
/// `f(x_bar) + g(z_bar) + <s - u, v - u> / gamma + ||v - u||^2 / (2 gamma)`.
pub fn merit_dre(state: &DrState, problem: &dyn Problem) -> f64 {
    let gamma = problem.gamma();
    let gap = &state.v - &state.u;
    let shift = &state.s - &state.u;
    problem.eval_f(&state.x_bar)
        + problem.eval_g(&state.z_bar)
        + shift.dot(&gap) / gamma
        + gap.norm_squared() / (2.0 * gamma)
}

/// DR envelope from its definition: the inner minimum over `w` of
/// `phi1(u) + phi2(w) + <grad phi1(u), w - u> + ||w - u||^2 / (2 gamma)`.
///
/// `grad phi1(u)` comes from the prox optimality condition, `(s - u) / gamma`,
/// and the inner minimizer is found with a fresh `solve_z` call at the shifted
/// point `u - gamma grad phi1(u)`. Only used to cross-check [`merit_dre`].
pub fn merit_dre_oracle(state: &DrState, problem: &dyn Problem) -> Result<f64, SolverError> {
    let gamma = problem.gamma();
    let grad_phi1 = (&state.s - &state.u) / gamma;
    let center = &state.u - &grad_phi1 * gamma;
    let z_w = problem.solve_z(&center, 1.0 / gamma)?;
    let w = problem.apply_b_shifted(&z_w);
    let dw = &w - &state.u;
    Ok(problem.eval_f(&state.x_bar)
        + problem.eval_g(&z_w)
        + grad_phi1.dot(&dw)
        + dw.norm_squared() / (2.0 * gamma))
}

/// Acceptance test on the merit change `d = merit(candidate) - merit(last)`.
///
/// `step_dr = ||G(s_prev) - s_prev||`, `step_aa = ||s_candidate - s_prev||`.
pub fn accept(d: f64, kind: MeritKind, nu1: f64, nu2: f64, step_dr: f64, step_aa: f64) -> bool {
    match kind {
        MeritKind::PrimalResidualNorm => d <= 0.0,
        MeritKind::DrEnvelope => d <= -nu1 * step_dr * step_dr - nu2 * step_aa * step_aa,
    }
}
