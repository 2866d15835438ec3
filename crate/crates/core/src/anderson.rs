//! Anderson acceleration over a sliding window of fixed-point images.
//!
//! For a fixed-point map `G` with residual `F(s) = G(s) - s`, the buffer keeps
//! the last `m + 1` pairs `(g_j, f_j)` and produces the extrapolated iterate
//!
//! ```text
//! s_AA = g_k - sum_j theta_j (g_{k-j+1} - g_{k-j})
//! ```
//!
//! where `theta` minimizes `|| f_k - sum_j theta_j (f_{k-j+1} - f_{k-j}) ||`.

use std::collections::VecDeque;

use nalgebra::DMatrix;

use crate::error::SolverError;
use crate::Vector;

/// Solves the Anderson least-squares problem for the mixing coefficients.
///
/// `columns[j-1]` holds `f_{k-j+1} - f_{k-j}`. The problem is solved through
/// its normal equations with a Tikhonov term `regularization * ||dF||_F^2`;
/// a rank-deficient system falls back to the minimum-norm solution, so
/// all-zero columns give `theta = 0`.
pub fn solve_theta(
    columns: &[Vector],
    f_k: &Vector,
    regularization: f64,
) -> Result<Vector, SolverError> {
    let cols = columns.len();
    if cols == 0 {
        return Ok(Vector::zeros(0));
    }
    for c in columns {
        SolverError::check_dim("anderson column", f_k.len(), c.len())?;
    }

    let mut normal = DMatrix::<f64>::zeros(cols, cols);
    let mut rhs = Vector::zeros(cols);
    for i in 0..cols {
        rhs[i] = columns[i].dot(f_k);
        for j in 0..=i {
            let v = columns[i].dot(&columns[j]);
            normal[(i, j)] = v;
            normal[(j, i)] = v;
        }
    }
    let frob2: f64 = (0..cols).map(|i| normal[(i, i)]).sum();
    if regularization > 0.0 {
        for i in 0..cols {
            normal[(i, i)] += regularization * frob2;
        }
    }

    let max_diag = (0..cols).map(|i| normal[(i, i)]).fold(0.0, f64::max);
    if max_diag == 0.0 {
        return Ok(Vector::zeros(cols));
    }

    // Symmetric PSD: the SVD doubles as an eigendecomposition, and truncating
    // tiny singular values gives the minimum-norm least-squares solution.
    let svd = normal.svd(true, true);
    let max_sv = svd.singular_values.max();
    let eps = max_sv * cols as f64 * f64::EPSILON;
    svd.solve(&rhs, eps)
        .map_err(|e| SolverError::SubSolver(format!("anderson least squares: {e}")))
}

/// Sliding history of fixed-point images and residuals.
#[derive(Debug, Clone)]
pub struct AndersonBuffer {
    m: usize,
    regularization: f64,
    images: VecDeque<Vector>,
    residuals: VecDeque<Vector>,
}

impl AndersonBuffer {
    pub fn new(m: usize, regularization: f64) -> Self {
        Self {
            m,
            regularization,
            images: VecDeque::with_capacity(m + 1),
            residuals: VecDeque::with_capacity(m + 1),
        }
    }

    /// Window size `m` (number of previous iterates used).
    pub fn window(&self) -> usize {
        self.m
    }

    /// Number of stored `(g, f)` pairs, at most `m + 1`.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Drops the whole history; the next push behaves like a first iteration.
    pub fn reset(&mut self) {
        self.images.clear();
        self.residuals.clear();
    }

    /// Number of difference columns the next accelerated step would use.
    pub fn effective_depth(&self) -> usize {
        self.m.min(self.len().saturating_sub(1))
    }

    /// Appends `(g_k, f_k)` and returns the accelerated iterate.
    pub fn push_and_accelerate(&mut self, g_k: Vector, f_k: Vector) -> Result<Vector, SolverError> {
        SolverError::check_dim("anderson push", g_k.len(), f_k.len())?;
        if let Some(prev) = self.images.back() {
            SolverError::check_dim("anderson history", prev.len(), g_k.len())?;
        }

        self.images.push_back(g_k);
        self.residuals.push_back(f_k);
        while self.images.len() > self.m + 1 {
            self.images.pop_front();
            self.residuals.pop_front();
        }

        let depth = self.effective_depth();
        let newest = self.images.len() - 1;
        let g_k = &self.images[newest];
        if depth == 0 {
            return Ok(g_k.clone());
        }

        // Column j-1 pairs index (newest - j + 1, newest - j).
        let df: Vec<Vector> = (1..=depth)
            .map(|j| &self.residuals[newest + 1 - j] - &self.residuals[newest - j])
            .collect();
        let theta = solve_theta(&df, &self.residuals[newest], self.regularization)?;

        let mut s_aa = g_k.clone();
        for j in 1..=depth {
            let dg = &self.images[newest + 1 - j] - &self.images[newest - j];
            s_aa.axpy(-theta[j - 1], &dg, 1.0);
        }
        Ok(s_aa)
    }
}
