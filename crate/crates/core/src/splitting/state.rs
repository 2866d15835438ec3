//! ADMM and DR iterates, single steps of each, and the maps between them.

use super::problem::Problem;
use crate::error::SolverError;
use crate::Vector;

/// ADMM iterate `(x, y, z)` with scaled dual `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmmState {
    pub x: Vector,
    pub y: Vector,
    pub z: Vector,
}

impl AdmmState {
    pub fn new(x: Vector, y: Vector, z: Vector) -> Self {
        Self { x, y, z }
    }

    pub fn zeros(problem: &dyn Problem) -> Self {
        let d = problem.dims();
        Self::new(
            Vector::zeros(d.x),
            Vector::zeros(d.constraints),
            Vector::zeros(d.z),
        )
    }

    pub fn check_dims(&self, problem: &dyn Problem) -> Result<(), SolverError> {
        let d = problem.dims();
        SolverError::check_dim("admm state x", d.x, self.x.len())?;
        SolverError::check_dim("admm state y", d.constraints, self.y.len())?;
        SolverError::check_dim("admm state z", d.z, self.z.len())
    }
}

/// DR iterate `s` together with everything one DR step computes from it.
#[derive(Debug, Clone, PartialEq)]
pub struct DrState {
    pub s: Vector,
    /// `u = A x_bar = prox_{gamma phi_1}(s)`.
    pub u: Vector,
    /// `v = B z_bar + c = prox_{gamma phi_2}(2u - s)`.
    pub v: Vector,
    pub x_bar: Vector,
    pub z_bar: Vector,
}

impl DrState {
    /// The DR image `G(s) = s + v - u`.
    pub fn next(&self) -> Vector {
        &self.s + &self.v - &self.u
    }

    /// `v - u`, which is also `G(s) - s`.
    pub fn gap(&self) -> Vector {
        &self.v - &self.u
    }
}

/// One ADMM iteration in the order x, y, z.
pub fn admm_step(state: &AdmmState, problem: &dyn Problem) -> Result<AdmmState, SolverError> {
    let beta = problem.beta();
    let bz_c = problem.apply_b_shifted(&state.z);
    let x = problem.solve_x(&(&bz_c - &state.y), beta)?;
    let ax = problem.apply_a(&x);
    let y = &state.y + &ax - &bz_c;
    let z = problem.solve_z(&(&ax + &y), beta)?;
    Ok(AdmmState { x, y, z })
}

/// One DR step from `s`: both proximal evaluations plus cached minimizers.
pub fn dr_step(s: &Vector, problem: &dyn Problem) -> Result<DrState, SolverError> {
    SolverError::check_dim("dr iterate", problem.dims().constraints, s.len())?;
    let weight = 1.0 / problem.gamma();
    let x_bar = problem.solve_x(s, weight)?;
    let u = problem.apply_a(&x_bar);
    let reflected = &u * 2.0 - s;
    let z_bar = problem.solve_z(&reflected, weight)?;
    let v = problem.apply_b_shifted(&z_bar);
    Ok(DrState {
        s: s.clone(),
        u,
        v,
        x_bar,
        z_bar,
    })
}

/// `(s, u, v) = (A x - y, A x, B z + c)`.
pub fn admm_to_dr(state: &AdmmState, problem: &dyn Problem) -> (Vector, Vector, Vector) {
    let u = problem.apply_a(&state.x);
    let s = &u - &state.y;
    let v = problem.apply_b_shifted(&state.z);
    (s, u, v)
}

/// Stationary triple from a (near) fixed point: `(x_bar, u - s*, z_bar)`.
pub fn recover(s_star: &Vector, state: &DrState) -> AdmmState {
    AdmmState {
        x: state.x_bar.clone(),
        y: &state.u - s_star,
        z: state.z_bar.clone(),
    }
}
