use crate::error::SolverError;
use crate::Vector;

/// Dimensions of a split problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    /// Length of `x`.
    pub x: usize,
    /// Length of `z`.
    pub z: usize,
    /// Number of rows of `A` (and `B`), i.e. the length of `s`, `u`, `v`, `y`.
    pub constraints: usize,
}

/// A problem `min f(x) + g(z)  s.t.  A x - B z = c` with penalty `beta`.
///
/// The two sub-problem solvers must be deterministic: equal inputs give
/// bit-identical outputs. Implementations are shared read-only between
/// concurrent solves; only [`Problem::set_beta`] mutates.
pub trait Problem: Send + Sync {
    fn dims(&self) -> Dims;

    /// Current penalty `beta > 0`. The DR step size is `gamma = 1 / beta`.
    fn beta(&self) -> f64;

    /// Changes the penalty, refactorizing whatever depends on it.
    fn set_beta(&mut self, beta: f64) -> Result<(), SolverError>;

    /// Minimizer of `f(x) + (weight / 2) ||A x - target||^2`.
    fn solve_x(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError>;

    /// Minimizer of `g(z) + (weight / 2) ||B z + c - target||^2`.
    fn solve_z(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError>;

    fn apply_a(&self, x: &Vector) -> Vector;
    fn apply_b(&self, z: &Vector) -> Vector;
    fn offset(&self) -> &Vector;

    fn eval_f(&self, x: &Vector) -> f64;
    fn eval_g(&self, z: &Vector) -> f64;

    /// `A^T r`, when the problem can provide it.
    fn apply_at(&self, _r: &Vector) -> Option<Vector> {
        None
    }

    /// `B^T r`, when the problem can provide it. Needed for the dual residual.
    fn apply_bt(&self, _r: &Vector) -> Option<Vector> {
        None
    }

    /// Gradient of `f`, for problems where `f` is differentiable.
    fn grad_f(&self, _x: &Vector) -> Option<Vector> {
        None
    }

    fn gamma(&self) -> f64 {
        1.0 / self.beta()
    }

    /// `B z + c`.
    fn apply_b_shifted(&self, z: &Vector) -> Vector {
        self.apply_b(z) + self.offset()
    }
}

/// Runtime probes of the [`Problem`] contract, used by tests of concrete
/// problems.
pub mod checks {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::Problem;
    use crate::Vector;

    fn random_vector(n: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vector {
        Vector::from_fn(n, |_, _| rng.random_range(-scale..scale))
    }

    /// Largest deviation of `apply(a p + q)` from `a apply(p) + apply(q)`
    /// over `probes` random draws, for both `A` and `B`, relative to the
    /// magnitude of the outputs.
    pub fn linearity_defect(problem: &dyn Problem, probes: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = problem.dims();
        let mut worst: f64 = 0.0;
        for _ in 0..probes {
            let alpha = rng.random_range(-2.0..2.0);
            let (p, q) = (
                random_vector(dims.x, 1.0, &mut rng),
                random_vector(dims.x, 1.0, &mut rng),
            );
            let lhs = problem.apply_a(&(&p * alpha + &q));
            let rhs = problem.apply_a(&p) * alpha + problem.apply_a(&q);
            worst = worst.max((&lhs - &rhs).amax() / (1.0 + rhs.amax()));

            let (p, q) = (
                random_vector(dims.z, 1.0, &mut rng),
                random_vector(dims.z, 1.0, &mut rng),
            );
            let lhs = problem.apply_b(&(&p * alpha + &q));
            let rhs = problem.apply_b(&p) * alpha + problem.apply_b(&q);
            worst = worst.max((&lhs - &rhs).amax() / (1.0 + rhs.amax()));
        }
        worst
    }

    /// Checks that `solve_x` and `solve_z` at `target` are not beaten by any of
    /// `trials` random perturbations of their output. Returns the largest
    /// improvement found (zero or negative means the fuzz found nothing).
    pub fn prox_optimality_gap(
        problem: &dyn Problem,
        target: &Vector,
        perturbation: f64,
        trials: usize,
        seed: u64,
    ) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weight = problem.beta();
        let dims = problem.dims();

        let x_obj = |x: &Vector| {
            problem.eval_f(x) + 0.5 * weight * (problem.apply_a(x) - target).norm_squared()
        };
        let z_obj = |z: &Vector| {
            problem.eval_g(z) + 0.5 * weight * (problem.apply_b_shifted(z) - target).norm_squared()
        };

        let x_bar = problem.solve_x(target, weight).expect("solve_x");
        let z_bar = problem.solve_z(target, weight).expect("solve_z");
        let (fx, fz) = (x_obj(&x_bar), z_obj(&z_bar));
        let mut best_gain = f64::NEG_INFINITY;
        for _ in 0..trials {
            let scale = perturbation * 10f64.powf(rng.random_range(-3.0..0.0));
            let x = &x_bar + random_vector(dims.x, scale, &mut rng);
            best_gain = best_gain.max(fx - x_obj(&x));
            let z = &z_bar + random_vector(dims.z, scale, &mut rng);
            best_gain = best_gain.max(fz - z_obj(&z));
        }
        best_gain
    }

    /// True when repeated sub-solves at the same input agree bit for bit.
    pub fn deterministic(problem: &dyn Problem, target: &Vector) -> bool {
        let w = problem.beta();
        problem.solve_x(target, w).ok() == problem.solve_x(target, w).ok()
            && problem.solve_z(target, w).ok() == problem.solve_z(target, w).ok()
    }
}
