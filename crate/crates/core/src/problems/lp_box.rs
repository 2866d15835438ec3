//! Binary segmentation through the Lp-box reformulation.
//!
//! `x in {0,1}^n` is written as `x in [0,1]^n` and `x` on the sphere
//! `||p - 1/2||^2 = n/4`. With `A = [I; I]`, `B = I`, `c = 0`:
//! `f(x) = x^T L x + d^T x`, `g(z1, z2) = indicator(box)(z1) + indicator(sphere)(z2)`.

use nalgebra_sparse::CscMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::data::Grid;
use crate::error::SolverError;
use crate::linalg::{csc_from_triplets, spmv, SpdFactor};
use crate::splitting::{AdmmState, BetaSchedule, Dims, Problem};
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct LpBoxSpec {
    pub image: Grid,
    /// Per-pixel cost of the label 1.
    pub unary: Vector,
    /// Graph Laplacian of the 4-neighborhood similarity graph.
    pub laplacian: CscMatrix<f64>,
    pub schedule: BetaSchedule,
}

/// `beta` from 5, times 1.03 every 5 iterations, capped at 1000.
pub const DEFAULT_SCHEDULE: BetaSchedule = BetaSchedule {
    start: 5.0,
    growth: 1.03,
    period: 5,
    cap: 1000.0,
};

/// Two-class 1D k-means on the intensities; returns (dark, bright) means.
fn intensity_means(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut dark, mut bright) = (lo, hi);
    for _ in 0..100 {
        let split = 0.5 * (dark + bright);
        let (mut s0, mut n0, mut s1, mut n1) = (0.0, 0usize, 0.0, 0usize);
        for &v in values {
            if v < split {
                s0 += v;
                n0 += 1;
            } else {
                s1 += v;
                n1 += 1;
            }
        }
        let next = (
            if n0 > 0 { s0 / n0 as f64 } else { dark },
            if n1 > 0 { s1 / n1 as f64 } else { bright },
        );
        if next == (dark, bright) {
            break;
        }
        (dark, bright) = next;
    }
    (dark, bright)
}

impl LpBoxSpec {
    /// Foreground is the brighter intensity cluster. Unary costs are
    /// `(I - mu_fg)^2 - (I - mu_bg)^2`; neighbors `i ~ j` are coupled with
    /// weight `smoothness * exp(-(I_i - I_j)^2 / (2 sigma^2))`.
    pub fn from_image(image: Grid, smoothness: f64, sigma: f64) -> Result<Self, SolverError> {
        if !(smoothness >= 0.0 && sigma > 0.0) {
            return Err(SolverError::InvalidProblem(
                "need smoothness >= 0 and sigma > 0".into(),
            ));
        }
        let (bg, fg) = intensity_means(&image.values);
        let unary = Vector::from_iterator(
            image.values.len(),
            image
                .values
                .iter()
                .map(|&v| (v - fg).powi(2) - (v - bg).powi(2)),
        );
        let (h, w) = (image.height, image.width);
        let n = h * w;
        let mut triplets = Vec::new();
        let mut degree = vec![0.0; n];
        let mut couple = |i: usize, j: usize, triplets: &mut Vec<_>| {
            let diff = image.values[i] - image.values[j];
            let wt = smoothness * (-diff * diff / (2.0 * sigma * sigma)).exp();
            triplets.push((i, j, -wt));
            triplets.push((j, i, -wt));
            degree[i] += wt;
            degree[j] += wt;
        };
        for r in 0..h {
            for c in 0..w {
                let i = r * w + c;
                if c + 1 < w {
                    couple(i, i + 1, &mut triplets);
                }
                if r + 1 < h {
                    couple(i, i + w, &mut triplets);
                }
            }
        }
        triplets.extend(degree.iter().enumerate().map(|(i, &d)| (i, i, d)));
        Ok(Self {
            laplacian: csc_from_triplets(n, n, triplets),
            image,
            unary,
            schedule: DEFAULT_SCHEDULE,
        })
    }

    pub fn pixels(&self) -> usize {
        self.image.values.len()
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.pixels();
        SolverError::check_dim("lp-box unary", n, self.unary.len())?;
        SolverError::check_dim("lp-box laplacian rows", n, self.laplacian.nrows())?;
        SolverError::check_dim("lp-box laplacian cols", n, self.laplacian.ncols())?;
        let t = self.laplacian.transpose();
        let asym = self
            .laplacian
            .triplet_iter()
            .zip(t.triplet_iter())
            .any(|(a, b)| a != b);
        if asym {
            return Err(SolverError::InvalidProblem(
                "laplacian must be symmetric".into(),
            ));
        }
        self.schedule.validate()
    }
}

/// Clamp to `[0, 1]`.
pub fn project_box(t: f64) -> f64 {
    t.clamp(0.0, 1.0)
}

/// Projection onto `||p - 1/2||^2 = n/4`; the center maps along `e1`.
pub fn project_lp_sphere(t: &[f64]) -> Vec<f64> {
    let n = t.len();
    let radius = (n as f64).sqrt() / 2.0;
    let norm = t.iter().map(|v| (v - 0.5) * (v - 0.5)).sum::<f64>().sqrt();
    if norm == 0.0 {
        let mut p = vec![0.5; n];
        p[0] += radius;
        return p;
    }
    let k = radius / norm;
    t.iter().map(|v| 0.5 + (v - 0.5) * k).collect()
}

#[derive(Debug, Clone)]
pub struct LpBoxProblem {
    laplacian: CscMatrix<f64>,
    unary: Vector,
    schedule: BetaSchedule,
    beta: f64,
    factor: SpdFactor,
    offset: Vector,
}

fn factor_for(laplacian: &CscMatrix<f64>, weight: f64) -> Result<SpdFactor, SolverError> {
    let n = laplacian.nrows();
    let diag = csc_from_triplets(n, n, (0..n).map(|i| (i, i, 2.0 * weight)));
    SpdFactor::new(&(laplacian * 2.0 + diag))
}

pub fn make_lp_box(spec: &LpBoxSpec) -> Result<LpBoxProblem, SolverError> {
    spec.validate()?;
    let beta = spec.schedule.beta_at(0);
    Ok(LpBoxProblem {
        factor: factor_for(&spec.laplacian, beta)?,
        laplacian: spec.laplacian.clone(),
        unary: spec.unary.clone(),
        schedule: spec.schedule,
        beta,
        offset: Vector::zeros(2 * spec.pixels()),
    })
}

impl LpBoxProblem {
    pub fn pixels(&self) -> usize {
        self.unary.len()
    }

    /// The penalty schedule the solver should follow.
    pub fn schedule(&self) -> BetaSchedule {
        self.schedule
    }

    /// Uniform random `x0` in `[0,1]^n`, `z0 = (x0, x0)`, `y0 = 0`.
    pub fn initial_state(&self, seed: u64) -> AdmmState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Vector::from_fn(self.pixels(), |_, _| rng.random::<f64>());
        let z = self.apply_a(&x);
        AdmmState::new(x, Vector::zeros(z.len()), z)
    }

    /// Labels `x_i > 1/2`.
    pub fn threshold(x: &Vector) -> Vec<bool> {
        x.iter().map(|&v| v > 0.5).collect()
    }
}

impl Problem for LpBoxProblem {
    fn dims(&self) -> Dims {
        let n = self.pixels();
        Dims {
            x: n,
            z: 2 * n,
            constraints: 2 * n,
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
        if beta != self.beta {
            self.factor = factor_for(&self.laplacian, beta)?;
            self.beta = beta;
        }
        Ok(())
    }

    fn solve_x(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError> {
        let n = self.pixels();
        SolverError::check_dim("lp-box solve_x", 2 * n, target.len())?;
        let rhs = Vector::from_fn(n, |i, _| {
            weight * (target[i] + target[n + i]) - self.unary[i]
        });
        if weight == self.beta {
            Ok(self.factor.solve(&rhs))
        } else {
            Ok(factor_for(&self.laplacian, weight)?.solve(&rhs))
        }
    }

    fn solve_z(&self, target: &Vector, _weight: f64) -> Result<Vector, SolverError> {
        let n = self.pixels();
        SolverError::check_dim("lp-box solve_z", 2 * n, target.len())?;
        let sphere = project_lp_sphere(&target.as_slice()[n..]);
        Ok(Vector::from_fn(2 * n, |i, _| {
            if i < n {
                project_box(target[i])
            } else {
                sphere[i - n]
            }
        }))
    }

    fn apply_a(&self, x: &Vector) -> Vector {
        let n = x.len();
        Vector::from_fn(2 * n, |i, _| x[i % n])
    }

    fn apply_b(&self, z: &Vector) -> Vector {
        z.clone()
    }

    fn offset(&self) -> &Vector {
        &self.offset
    }

    fn eval_f(&self, x: &Vector) -> f64 {
        x.dot(&spmv(&self.laplacian, x)) + self.unary.dot(x)
    }

    fn eval_g(&self, z: &Vector) -> f64 {
        let n = self.pixels();
        let in_box = z.rows(0, n).iter().all(|&v| (0.0..=1.0).contains(&v));
        let sq: f64 = z.rows(n, n).iter().map(|v| (v - 0.5) * (v - 0.5)).sum();
        let on_sphere = (sq - n as f64 / 4.0).abs() <= 1e-9 * n as f64;
        if in_box && on_sphere {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn apply_at(&self, r: &Vector) -> Option<Vector> {
        let n = self.pixels();
        Some(Vector::from_fn(n, |i, _| r[i] + r[n + i]))
    }

    fn apply_bt(&self, r: &Vector) -> Option<Vector> {
        Some(r.clone())
    }

    fn grad_f(&self, x: &Vector) -> Option<Vector> {
        Some(spmv(&self.laplacian, x) * 2.0 + &self.unary)
    }
}
