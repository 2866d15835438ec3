//! Sparse logistic regression with an l_{1/2} penalty.
//!
//! `x = (w, v)`, `z = (z1, z2)`, `x = z`,
//! `f(x) = sum_i log(1 + exp(-b_i (a_i^T w + v)))`,
//! `g(z) = p * lambda * sum_i |z1_i|^{1/2}`.

use nalgebra::DMatrix;

use crate::error::SolverError;
use crate::splitting::{Dims, Problem};
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct LqLogisticSpec {
    /// `p x n`, one sample per row.
    pub features: DMatrix<f64>,
    /// `p` labels in `{-1, +1}`.
    pub labels: Vector,
    pub lambda: f64,
    pub beta: f64,
}

impl LqLogisticSpec {
    pub fn samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn features_dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        SolverError::check_dim("logistic labels", self.features.nrows(), self.labels.len())?;
        if self.labels.iter().any(|&b| b != 1.0 && b != -1.0) {
            return Err(SolverError::InvalidProblem(
                "labels must be +1 or -1".into(),
            ));
        }
        let has_pos = self.labels.iter().any(|&b| b == 1.0);
        let has_neg = self.labels.iter().any(|&b| b == -1.0);
        if !(has_pos && has_neg) {
            return Err(SolverError::InvalidProblem(
                "labels must contain both classes".into(),
            ));
        }
        if !(self.lambda >= 0.0 && self.beta > 0.0) {
            return Err(SolverError::InvalidProblem(
                "need lambda >= 0 and beta > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Minimizer of `lam |t|^{1/2} + (t - a)^2 / 2`.
///
/// On `t > 0` with `r = sqrt(t)` the stationarity condition is the depressed
/// cubic `r^3 - |a| r + lam / 2 = 0`; its largest root is compared against
/// `t = 0`. Ties go to zero.
pub fn half_power_prox(a: f64, lam: f64) -> f64 {
    if lam <= 0.0 {
        return a;
    }
    let mag = a.abs();
    if mag == 0.0 {
        return 0.0;
    }
    // Three real roots iff 4|a|^3 >= 27 (lam / 2)^2.
    if 16.0 * mag * mag * mag < 27.0 * lam * lam {
        return 0.0;
    }
    let arg = (-(3.0 * lam) / (4.0 * mag) * (3.0 / mag).sqrt()).clamp(-1.0, 1.0);
    let r = 2.0 * (mag / 3.0).sqrt() * (arg.acos() / 3.0).cos();
    let t = r * r;
    let objective = |t: f64| lam * t.sqrt() + 0.5 * (t - mag) * (t - mag);
    if objective(t) < 0.5 * mag * mag {
        t.copysign(a)
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub struct LqLogisticProblem {
    /// Rows `b_i (a_i, 1)`, so margins are `margin_matrix * x`.
    margin_matrix: DMatrix<f64>,
    penalty: f64,
    beta: f64,
    offset: Vector,
    newton_tolerance: f64,
    newton_max_iter: usize,
}

fn softplus_neg(m: f64) -> f64 {
    // log(1 + exp(-m)), stable for both signs.
    if m > 0.0 {
        (-m).exp().ln_1p()
    } else {
        -m + m.exp().ln_1p()
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

pub fn make_lq_logistic(spec: &LqLogisticSpec) -> Result<LqLogisticProblem, SolverError> {
    spec.validate()?;
    let (p, n) = spec.features.shape();
    let margin_matrix = DMatrix::from_fn(p, n + 1, |i, j| {
        let a = if j < n { spec.features[(i, j)] } else { 1.0 };
        spec.labels[i] * a
    });
    Ok(LqLogisticProblem {
        margin_matrix,
        penalty: p as f64 * spec.lambda,
        beta: spec.beta,
        offset: Vector::zeros(n + 1),
        newton_tolerance: 1e-10,
        newton_max_iter: 100,
    })
}

impl LqLogisticProblem {
    pub fn newton_tolerance(&self) -> f64 {
        self.newton_tolerance
    }

    fn dim(&self) -> usize {
        self.margin_matrix.ncols()
    }

    fn gradient(&self, x: &Vector) -> Vector {
        let margins = &self.margin_matrix * x;
        let weights = margins.map(|m| -sigmoid(-m));
        self.margin_matrix.tr_mul(&weights)
    }

    /// Gradient of `f(x) + (weight / 2) ||x - target||^2`.
    pub fn subproblem_gradient(&self, x: &Vector, target: &Vector, weight: f64) -> Vector {
        self.gradient(x) + (x - target) * weight
    }

    /// Gradient-norm target for the Newton solve: the configured tolerance,
    /// raised to the rounding floor of `weight * (x - target)` when that is
    /// larger.
    pub fn gradient_tolerance(&self, x: &Vector, target: &Vector, weight: f64) -> f64 {
        let floor = 8.0 * f64::EPSILON * weight * x.norm().max(target.norm());
        self.newton_tolerance.max(floor)
    }

    fn subproblem_value(&self, x: &Vector, target: &Vector, weight: f64) -> f64 {
        self.eval_f(x) + 0.5 * weight * (x - target).norm_squared()
    }
}

impl Problem for LqLogisticProblem {
    fn dims(&self) -> Dims {
        let d = self.dim();
        Dims {
            x: d,
            z: d,
            constraints: d,
        }
    }

    fn beta(&self) -> f64 {
        self.beta
    }

    fn set_beta(&mut self, beta: f64) -> Result<(), SolverError> {
        if !(beta > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "beta must be positive, got {beta}"
            )));
        }
        self.beta = beta;
        Ok(())
    }

    /// Damped Newton from `x = target` on the strongly convex sub-problem.
    fn solve_x(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError> {
        SolverError::check_dim("logistic solve_x", self.dim(), target.len())?;
        let mut x = target.clone();
        let mut grad = self.subproblem_gradient(&x, target, weight);
        let mut value = self.subproblem_value(&x, target, weight);

        for _ in 0..self.newton_max_iter {
            let gnorm = grad.norm();
            if gnorm <= self.gradient_tolerance(&x, target, weight) {
                return Ok(x);
            }
            let margins = &self.margin_matrix * &x;
            let curv = margins.map(|m| {
                let s = sigmoid(m);
                s * (1.0 - s)
            });
            let scaled = DMatrix::from_fn(self.margin_matrix.nrows(), self.dim(), |i, j| {
                self.margin_matrix[(i, j)] * curv[i]
            });
            let mut hessian = self.margin_matrix.tr_mul(&scaled);
            for i in 0..self.dim() {
                hessian[(i, i)] += weight;
            }
            let chol = hessian.cholesky().ok_or_else(|| {
                SolverError::SubSolver("logistic Hessian not positive definite".into())
            })?;
            let step = -chol.solve(&grad);
            let slope = grad.dot(&step);

            let mut alpha = 1.0;
            let mut moved = false;
            for _ in 0..40 {
                let trial = &x + &step * alpha;
                let trial_value = self.subproblem_value(&trial, target, weight);
                let trial_grad = self.subproblem_gradient(&trial, target, weight);
                // Near the minimizer the value stalls in floating point, so a
                // smaller gradient also counts as progress.
                if trial_value <= value + 1e-4 * alpha * slope || trial_grad.norm() < gnorm {
                    x = trial;
                    value = trial_value;
                    grad = trial_grad;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !moved {
                break;
            }
        }

        let gnorm = grad.norm();
        let tol = self.gradient_tolerance(&x, target, weight);
        if gnorm <= tol {
            Ok(x)
        } else {
            Err(SolverError::SubSolver(format!(
                "logistic Newton stopped at gradient norm {gnorm:e} > {tol:e}"
            )))
        }
    }

    fn solve_z(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError> {
        SolverError::check_dim("logistic solve_z", self.dim(), target.len())?;
        let lam = self.penalty / weight;
        let last = self.dim() - 1;
        Ok(Vector::from_fn(self.dim(), |i, _| {
            if i == last {
                target[i]
            } else {
                half_power_prox(target[i], lam)
            }
        }))
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
        (&self.margin_matrix * x)
            .iter()
            .map(|&m| softplus_neg(m))
            .sum()
    }

    fn eval_g(&self, z: &Vector) -> f64 {
        let last = self.dim() - 1;
        self.penalty * z.iter().take(last).map(|t| t.abs().sqrt()).sum::<f64>()
    }

    fn apply_at(&self, r: &Vector) -> Option<Vector> {
        Some(r.clone())
    }

    fn apply_bt(&self, r: &Vector) -> Option<Vector> {
        Some(r.clone())
    }

    fn grad_f(&self, x: &Vector) -> Option<Vector> {
        Some(self.gradient(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::data::gen_logistic_data;
    use crate::splitting::checks;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn prox_objective(t: f64, a: f64, lam: f64) -> f64 {
        lam * t.abs().sqrt() + 0.5 * (t - a) * (t - a)
    }

    /// Brute-force minimizer on a uniform grid over `[lo, hi]`.
    fn grid_argmin(a: f64, lam: f64, lo: f64, hi: f64, step: f64) -> f64 {
        let count = ((hi - lo) / step).round() as usize;
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=count {
            let t = lo + i as f64 * step;
            let v = prox_objective(t, a, lam);
            if v < best.0 {
                best = (v, t);
            }
        }
        best.1
    }

    /// Coarse grid on [-4, 4], then a fine grid around the coarse winner and
    /// around zero.
    fn refined_grid_argmin(a: f64, lam: f64) -> f64 {
        let coarse = grid_argmin(a, lam, -4.0, 4.0, 1e-3);
        let fine = grid_argmin(a, lam, coarse - 2e-3, coarse + 2e-3, 1e-7);
        if prox_objective(0.0, a, lam) <= prox_objective(fine, a, lam) {
            0.0
        } else {
            fine
        }
    }

    #[test]
    fn prox_zero_penalty_is_identity() {
        for &a in &[-3.0, -1e-9, 0.0, 0.25, 7.0] {
            assert_eq!(half_power_prox(a, 0.0), a);
        }
    }

    #[test]
    fn prox_at_origin_is_zero() {
        assert_eq!(half_power_prox(0.0, 1.0), 0.0);
        assert_eq!(half_power_prox(0.0, 1e-7), 0.0);
    }

    #[test]
    fn prox_matches_fine_grid_at_lam1_a3() {
        let oracle = grid_argmin(3.0, 1.0, -4.0, 4.0, 1e-6);
        let t = half_power_prox(3.0, 1.0);
        assert!((t - oracle).abs() <= 1e-5, "prox {t} vs grid {oracle}");
        // Frozen from an independent 1e-6 grid search.
        assert!((t - 2.695453).abs() < 1e-5);
    }

    #[test]
    fn prox_matches_grid_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let lam = rng.random_range(0.0..2.0);
            let a = rng.random_range(-4.0..4.0);
            let t = half_power_prox(a, lam);
            let oracle = refined_grid_argmin(a, lam);
            let tie = (prox_objective(t, a, lam) - prox_objective(oracle, a, lam)).abs() < 1e-9;
            assert!(
                (t - oracle).abs() <= 1e-5 || tie,
                "lam = {lam}, a = {a}: prox {t}, grid {oracle}"
            );
            assert!(prox_objective(t, a, lam) <= prox_objective(oracle, a, lam) + 1e-12);
        }
    }

    #[test]
    fn prox_is_odd_and_shrinks() {
        for &(a, lam) in &[(2.0, 0.5), (0.9, 0.3), (10.0, 3.0)] {
            let t = half_power_prox(a, lam);
            assert_eq!(half_power_prox(-a, lam), -t);
            assert!(t <= a && t >= 0.0);
        }
    }

    #[test]
    fn solve_z_with_zero_lambda_is_identity() {
        let mut spec = gen_logistic_data(5, 12, 3);
        spec.lambda = 0.0;
        let p = make_lq_logistic(&spec).unwrap();
        let t = Vector::from_fn(6, |i, _| i as f64 * 0.37 - 1.0);
        assert_eq!(p.solve_z(&t, p.beta()).unwrap(), t);
    }

    #[test]
    fn newton_reaches_gradient_tolerance() {
        let spec = gen_logistic_data(100, 100, 0);
        let p = make_lq_logistic(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let t = Vector::from_fn(101, |_, _| rng.random_range(-1.0..1.0));
            let x = p.solve_x(&t, p.beta()).unwrap();
            assert!(p.subproblem_gradient(&x, &t, p.beta()).norm() <= 1e-10);
        }
    }

    #[test]
    fn rejects_single_class() {
        let mut spec = gen_logistic_data(4, 10, 1);
        spec.labels.fill(1.0);
        assert!(make_lq_logistic(&spec).is_err());
        spec.labels[0] = 0.5;
        assert!(make_lq_logistic(&spec).is_err());
    }

    #[test]
    fn contract_probes() {
        let mut spec = gen_logistic_data(20, 30, 2);
        // A moderate penalty so the fuzz test sees both pieces of g.
        spec.beta = 10.0;
        spec.lambda = 0.01;
        let p = make_lq_logistic(&spec).unwrap();
        assert!(checks::linearity_defect(&p, 10, 3) <= 1e-12);
        let t = Vector::from_fn(21, |i, _| ((i * 7 % 11) as f64 - 5.0) * 0.1);
        assert!(checks::prox_optimality_gap(&p, &t, 0.5, 1000, 4) <= 1e-12);
        assert!(checks::deterministic(&p, &t));
    }
}
