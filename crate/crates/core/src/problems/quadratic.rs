//! Separable quadratic consensus problem with closed-form everything.
//!
//! `f(x) = (cf / 2) ||x - a||^2`, `g(z) = (cg / 2) ||z - b||^2`, `x = z`.
//! The DR map is affine, so its fixed point and the stationary triple are
//! available in closed form for oracle tests.

use crate::error::SolverError;
use crate::splitting::{AdmmState, Dims, Problem};
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticConsensusSpec {
    pub target_a: Vector,
    pub target_b: Vector,
    pub curvature_f: f64,
    pub curvature_g: f64,
    pub beta: f64,
}

impl QuadraticConsensusSpec {
    /// One-dimensional instance.
    pub fn scalar(a: f64, b: f64, curvature_f: f64, curvature_g: f64, beta: f64) -> Self {
        Self {
            target_a: Vector::from_element(1, a),
            target_b: Vector::from_element(1, b),
            curvature_f,
            curvature_g,
            beta,
        }
    }

    fn validate(&self) -> Result<(), SolverError> {
        if !(self.curvature_f > 0.0 && self.curvature_g > 0.0) {
            return Err(SolverError::InvalidProblem(
                "curvatures must be positive".into(),
            ));
        }
        if !(self.beta > 0.0) {
            return Err(SolverError::InvalidProblem("beta must be positive".into()));
        }
        SolverError::check_dim(
            "quadratic targets",
            self.target_a.len(),
            self.target_b.len(),
        )
    }
}

#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    spec: QuadraticConsensusSpec,
    offset: Vector,
}

impl Problem for QuadraticProblem {
    fn dims(&self) -> Dims {
        let n = self.spec.target_a.len();
        Dims {
            x: n,
            z: n,
            constraints: n,
        }
    }

    fn beta(&self) -> f64 {
        self.spec.beta
    }

    fn set_beta(&mut self, beta: f64) -> Result<(), SolverError> {
        if !(beta > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "beta must be positive, got {beta}"
            )));
        }
        self.spec.beta = beta;
        Ok(())
    }

    fn solve_x(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError> {
        SolverError::check_dim("quadratic solve_x", self.spec.target_a.len(), target.len())?;
        let cf = self.spec.curvature_f;
        Ok((&self.spec.target_a * cf + target * weight) / (cf + weight))
    }

    fn solve_z(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError> {
        SolverError::check_dim("quadratic solve_z", self.spec.target_b.len(), target.len())?;
        let cg = self.spec.curvature_g;
        Ok((&self.spec.target_b * cg + target * weight) / (cg + weight))
    }

    fn apply_a(&self, x: &Vector) -> Vector {
        x.clone()
    }

    fn apply_b(&self, z: &Vector) -> Vector {
        z.clone()
    }

    fn offset(&self) -> &Vector {
        &self.offset
    }

    fn eval_f(&self, x: &Vector) -> f64 {
        0.5 * self.spec.curvature_f * (x - &self.spec.target_a).norm_squared()
    }

    fn eval_g(&self, z: &Vector) -> f64 {
        0.5 * self.spec.curvature_g * (z - &self.spec.target_b).norm_squared()
    }

    fn apply_at(&self, r: &Vector) -> Option<Vector> {
        Some(r.clone())
    }

    fn apply_bt(&self, r: &Vector) -> Option<Vector> {
        Some(r.clone())
    }

    fn grad_f(&self, x: &Vector) -> Option<Vector> {
        Some((x - &self.spec.target_a) * self.spec.curvature_f)
    }
}

/// The problem plus its analytic solution.
#[derive(Debug, Clone)]
pub struct QuadraticOracle {
    pub problem: QuadraticProblem,
    /// Fixed point of the DR map.
    pub s_star: Vector,
    /// Stationary triple `(x*, y*, z*)`.
    pub stationary: AdmmState,
}

pub fn make_quadratic(spec: &QuadraticConsensusSpec) -> Result<QuadraticOracle, SolverError> {
    spec.validate()?;
    let (cf, cg, beta) = (spec.curvature_f, spec.curvature_g, spec.beta);
    let x_star = (&spec.target_a * cf + &spec.target_b * cg) / (cf + cg);
    // u(s*) = x* with u(s) = (cf a + beta s) / (cf + beta).
    let s_star = (&x_star * (cf + beta) - &spec.target_a * cf) / beta;
    let y_star = &x_star - &s_star;
    let n = spec.target_a.len();
    Ok(QuadraticOracle {
        problem: QuadraticProblem {
            spec: spec.clone(),
            offset: Vector::zeros(n),
        },
        s_star,
        stationary: AdmmState::new(x_star.clone(), y_star, x_star),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitting::checks;

    #[test]
    fn toy_beta1_closed_forms() {
        let o = make_quadratic(&QuadraticConsensusSpec::scalar(1.0, 3.0, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(o.s_star[0], 3.0);
        assert_eq!(o.stationary.x[0], 2.0);
        assert_eq!(o.stationary.y[0], -1.0);
        assert_eq!(o.stationary.z[0], 2.0);
    }

    #[test]
    fn toy_beta4_closed_forms() {
        let o = make_quadratic(&QuadraticConsensusSpec::scalar(1.0, 3.0, 2.0, 1.0, 4.0)).unwrap();
        assert!((o.s_star[0] - 2.0).abs() < 1e-15);
        assert!((o.stationary.x[0] - 5.0 / 3.0).abs() < 1e-15);
        assert!((o.stationary.y[0] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn compatible_targets() {
        let o = make_quadratic(&QuadraticConsensusSpec::scalar(0.7, 0.7, 1.5, 3.0, 2.0)).unwrap();
        assert!((o.stationary.x[0] - 0.7).abs() < 1e-15);
        assert!((o.stationary.z[0] - 0.7).abs() < 1e-15);
        assert!(o.stationary.y[0].abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_curvature() {
        assert!(make_quadratic(&QuadraticConsensusSpec::scalar(1.0, 3.0, 0.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn contract_probes() {
        let spec = QuadraticConsensusSpec {
            target_a: Vector::from_column_slice(&[1.0, -2.0, 0.5]),
            target_b: Vector::from_column_slice(&[3.0, 0.0, -1.0]),
            curvature_f: 2.0,
            curvature_g: 0.5,
            beta: 3.0,
        };
        let o = make_quadratic(&spec).unwrap();
        assert!(checks::linearity_defect(&o.problem, 20, 1) <= 1e-12);
        let t = Vector::from_column_slice(&[0.3, 0.1, -0.4]);
        assert!(checks::prox_optimality_gap(&o.problem, &t, 1.0, 1000, 2) <= 0.0);
        assert!(checks::deterministic(&o.problem, &t));
    }
}
