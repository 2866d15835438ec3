//! ADMM and DR splitting cores, merit functions, and the solvers built on them.

mod aadr;
mod admm;
mod config;
pub mod merit;
mod problem;
mod registry;
pub mod residual;
pub mod state;
mod trace;

use thiserror::Error;

pub use aadr::aadr_solve;
pub use admm::{aa_admm_solve, admm_solve};
pub use config::{BetaSchedule, SolverConfig, Termination};
pub use merit::{accept, merit_dre, merit_dre_oracle, merit_drp, MeritKind};
pub use problem::{checks, Dims, Problem};
pub use registry::{AaAdmm, Aadr, Admm, Solver, SolverRegistry};
pub use residual::{combined_residual_dr, normalize_residual, residuals_admm, ResidualReport};
pub use state::{admm_step, admm_to_dr, dr_step, recover, AdmmState, DrState};
pub use trace::{IterationRecord, IterationTrace};

use crate::error::SolverError;
use crate::Vector;

/// Result of a completed solve.
#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
    /// Final DR iterate, for the DR-based solvers.
    pub s: Option<Vector>,
    pub trace: IterationTrace,
    pub converged: bool,
    /// Accepted iterations.
    pub iterations: usize,
    /// Value of the termination residual at the end.
    pub final_residual: f64,
}

/// A solve that stopped on an error, with the trace recorded up to it.
#[derive(Debug, Clone, Error)]
#[error("{error} (after {} evaluations)", trace.len())]
pub struct SolveFailure {
    pub error: SolverError,
    pub trace: IterationTrace,
}
