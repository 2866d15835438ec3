//! Primal, dual and combined residuals.

use super::problem::Problem;
use super::state::{AdmmState, DrState};
use crate::error::SolverError;
use crate::Vector;

/// Residuals between two consecutive ADMM iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `A x_k - B z_{k-1} - c`.
    pub primal: Vector,
    /// `beta B^T A (x_k - x_{k-1})`; `None` when the problem has no `B^T`.
    pub dual: Option<Vector>,
    /// `beta ||A x_k - B z_{k-1} - c||^2 + beta ||A (x_k - x_{k-1})||^2`.
    pub combined: f64,
    /// Normalized combined residual `sqrt(r_c / (N_A a^2))`.
    pub normalized: f64,
    /// Row count of `A`.
    pub rows: usize,
}

/// `R = sqrt(r_c / (rows * a^2))`.
pub fn normalize_residual(combined: f64, rows: usize, scale: f64) -> f64 {
    (combined / (rows as f64 * scale * scale)).sqrt()
}

/// Residuals of the ADMM step `prev -> curr`, normalized with scale `a`.
pub fn residuals_admm(
    prev: &AdmmState,
    curr: &AdmmState,
    problem: &dyn Problem,
    scale: f64,
) -> ResidualReport {
    let beta = problem.beta();
    let ax = problem.apply_a(&curr.x);
    let primal = &ax - problem.apply_b_shifted(&prev.z);
    let a_dx = &ax - problem.apply_a(&prev.x);
    let dual = problem.apply_bt(&a_dx).map(|r| r * beta);
    let combined = beta * primal.norm_squared() + beta * a_dx.norm_squared();
    let rows = problem.dims().constraints;
    ResidualReport {
        primal,
        dual,
        combined,
        normalized: normalize_residual(combined, rows, scale),
        rows,
    }
}

/// Combined residual of a DR iterate via a partial step:
/// `s' = s + v - u`, `u' = prox_{gamma phi_1}(s')`,
/// `r_c = (||u' - v||^2 + ||u' - u||^2) / gamma`.
///
/// Returns `(r_c, R)`.
pub fn combined_residual_dr(
    state: &DrState,
    problem: &dyn Problem,
    scale: f64,
) -> Result<(f64, f64), SolverError> {
    let gamma = problem.gamma();
    let s_next = state.next();
    let u_next = problem.apply_a(&problem.solve_x(&s_next, 1.0 / gamma)?);
    let combined =
        ((&u_next - &state.v).norm_squared() + (&u_next - &state.u).norm_squared()) / gamma;
    let rows = problem.dims().constraints;
    Ok((combined, normalize_residual(combined, rows, scale)))
}
