//! Splitting methods for nonconvex problems of the form
//!
//! ```text
//! min f(x) + g(z)   s.t.   A x - B z = c
//! ```
//!
//! The crate provides plain ADMM, its Douglas-Rachford (DR) fixed-point form,
//! and Anderson acceleration of the DR iterate guarded by a merit function
//! (primal residual norm or DR envelope). A general Anderson-accelerated ADMM
//! on the primal/dual pair is included as a comparison baseline.
//!
//! Solvers are exposed both as free functions ([`aadr_solve`], [`admm_solve`],
//! [`aa_admm_solve`]) and as [`Solver`] trait objects looked up by name in a
//! [`SolverRegistry`].

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anderson;
pub mod error;
pub mod linalg;
pub mod problems;
pub mod splitting;

pub use anderson::{solve_theta, AndersonBuffer};
pub use error::SolverError;
pub use splitting::{
    aa_admm_solve, aadr_solve, admm_solve, BetaSchedule, Dims, IterationRecord, IterationTrace,
    MeritKind, Problem, SolveFailure, SolveOutput, Solver, SolverConfig, SolverRegistry,
    Termination,
};

/// Dense column vector used for every iterate.
pub type Vector = nalgebra::DVector<f64>;
