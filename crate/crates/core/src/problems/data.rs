//! Deterministic synthetic data for the problem instances.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::logistic::LqLogisticSpec;
use crate::error::SolverError;
use crate::Vector;

/// Sparse random classification data: features with about ten nonzeros per
/// row, a sparse ground-truth weight vector with about 10% nonzeros, and
/// labels `sign(A w + v + noise)` with noise variance 0.1.
///
/// Draws are repeated from a derived stream until both labels occur.
/// `lambda = 1e-4` and `beta = 1e5`.
pub fn gen_logistic_data(n: usize, p: usize, seed: u64) -> LqLogisticSpec {
    assert!(n >= 2 && p >= 2, "need n, p >= 2");
    let density = (10.0 / n as f64).min(1.0);
    let mut attempt = 0u64;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let sparse_normal = |keep: f64, rng: &mut ChaCha8Rng| {
            let value: f64 = rng.sample(StandardNormal);
            if rng.random::<f64>() < keep {
                value
            } else {
                0.0
            }
        };
        let w_true = Vector::from_fn(n, |_, _| sparse_normal(0.1, &mut rng));
        let v_true: f64 = rng.sample(StandardNormal);
        let features = DMatrix::from_fn(p, n, |_, _| sparse_normal(density, &mut rng));
        let noise_sd = 0.1f64.sqrt();
        let scores = &features * &w_true;
        let labels = Vector::from_fn(p, |i, _| {
            let eps: f64 = rng.sample(StandardNormal);
            let t = scores[i] + v_true + noise_sd * eps;
            if t >= 0.0 {
                1.0
            } else {
                -1.0
            }
        });

        let pos = labels.iter().any(|&b| b > 0.0);
        let neg = labels.iter().any(|&b| b < 0.0);
        if pos && neg {
            return LqLogisticSpec {
                features,
                labels,
                lambda: 1e-4,
                beta: 1e5,
            };
        }
        attempt += 1;
    }
}

/// Row-major grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

impl Grid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// Parses `"H W"` followed by `H * W` whitespace-separated values.
    pub fn parse(text: &str) -> Result<Self, SolverError> {
        let bad = |msg: String| SolverError::InvalidProblem(format!("grid file: {msg}"));
        let mut tokens = text.split_whitespace();
        let mut dim = |name: &str| -> Result<usize, SolverError> {
            tokens
                .next()
                .ok_or_else(|| bad(format!("missing {name}")))?
                .parse::<usize>()
                .map_err(|e| bad(format!("{name}: {e}")))
        };
        let height = dim("height")?;
        let width = dim("width")?;
        if height == 0 || width == 0 {
            return Err(bad("empty image".into()));
        }
        let values = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|e| bad(format!("value {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != height * width {
            return Err(bad(format!(
                "expected {} values, found {}",
                height * width,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad("non-finite value".into()));
        }
        Ok(Self {
            height,
            width,
            values,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.height, self.width);
        for row in self.values.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Two-region test image: a centered disk of intensity 0.8 on a 0.2
/// background, with Gaussian noise of standard deviation `noise`. Returns the
/// image and the disk mask.
pub fn two_region_image(height: usize, width: usize, noise: f64, seed: u64) -> (Grid, Vec<bool>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cy, cx) = ((height as f64 - 1.0) / 2.0, (width as f64 - 1.0) / 2.0);
    let radius = 0.3 * height.min(width) as f64;
    let mut values = Vec::with_capacity(height * width);
    let mut mask = Vec::with_capacity(height * width);
    for r in 0..height {
        for c in 0..width {
            let inside = (r as f64 - cy).hypot(c as f64 - cx) <= radius;
            let base = if inside { 0.8 } else { 0.2 };
            let eps: f64 = rng.sample(StandardNormal);
            values.push(base + noise * eps);
            mask.push(inside);
        }
    }
    (
        Grid {
            height,
            width,
            values,
        },
        mask,
    )
}
