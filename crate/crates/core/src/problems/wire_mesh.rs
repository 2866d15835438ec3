//! Wire mesh fitted to a sphere with fixed edge lengths.
//!
//! `x` stacks the 3D vertex positions. `A` stacks a selector for every vertex
//! (soft constraint: lie on the sphere) and the difference of every edge's
//! endpoints (hard constraint: length `l`); `B = I`, `c = 0`.
//! `f(x) = ||L (x - x_ref)||^2 / 2` and
//! `g(z) = sum_i (w_i / 2) dist(z_i, sphere)^2 + sum_j indicator(||z_j|| = l)`.

use std::sync::Arc;

use nalgebra_sparse::CscMatrix;

use crate::error::SolverError;
use crate::linalg::{csc_from_triplets, spmv, spmv_transpose, SpdFactor};
use crate::splitting::{AdmmState, Dims, Problem};
use crate::Vector;

#[derive(Debug, Clone, PartialEq)]
pub struct WireMeshSpec {
    pub rows: usize,
    pub cols: usize,
    pub center: [f64; 3],
    pub radius: f64,
    pub edge_length: f64,
    /// One soft weight per vertex.
    pub soft_weights: Vec<f64>,
    pub beta: f64,
    /// Scale of the grid Laplacian used as `L`; zero gives `L = 0`.
    pub smoothness: f64,
    /// Reference positions `x_ref`, also the default starting point.
    pub reference: Vector,
}

impl WireMeshSpec {
    /// `rows x cols` latitude/longitude patch on the unit sphere spanning
    /// `span` radians in each direction, with `l` the mean edge length of the
    /// patch, unit weights, `beta = 1e4` and `L = 0`.
    pub fn sphere_patch(rows: usize, cols: usize, span: f64) -> Self {
        let mut reference = Vector::zeros(3 * rows * cols);
        for r in 0..rows {
            let lat = span * (r as f64 / (rows.max(2) - 1) as f64 - 0.5);
            for c in 0..cols {
                let lon = span * (c as f64 / (cols.max(2) - 1) as f64 - 0.5);
                let i = 3 * (r * cols + c);
                reference[i] = lat.cos() * lon.cos();
                reference[i + 1] = lat.cos() * lon.sin();
                reference[i + 2] = lat.sin();
            }
        }
        let mut spec = Self {
            rows,
            cols,
            center: [0.0; 3],
            radius: 1.0,
            edge_length: 1.0,
            soft_weights: vec![1.0; rows * cols],
            beta: 1e4,
            smoothness: 0.0,
            reference,
        };
        let lengths: Vec<f64> = spec
            .edges()
            .iter()
            .map(|&(a, b)| (vertex(&spec.reference, a) - vertex(&spec.reference, b)).norm())
            .collect();
        spec.edge_length = lengths.iter().sum::<f64>() / lengths.len().max(1) as f64;
        spec
    }

    pub fn vertices(&self) -> usize {
        self.rows * self.cols
    }

    /// Horizontal then vertical grid edges as vertex index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let id = |r: usize, c: usize| r * self.cols + c;
        let mut edges = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols.saturating_sub(1) {
                edges.push((id(r, c), id(r, c + 1)));
            }
        }
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
        edges
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidProblem(m.to_string()));
        if self.rows < 2 || self.cols < 2 {
            return bad("wire mesh needs at least 2x2 vertices");
        }
        if !(self.edge_length > 0.0 && self.radius > 0.0 && self.beta > 0.0) {
            return bad("edge length, radius and beta must be positive");
        }
        if self.smoothness < 0.0 || self.soft_weights.iter().any(|&w| !(w >= 0.0)) {
            return bad("weights must be nonnegative");
        }
        SolverError::check_dim(
            "wire mesh weights",
            self.vertices(),
            self.soft_weights.len(),
        )?;
        SolverError::check_dim(
            "wire mesh reference",
            3 * self.vertices(),
            self.reference.len(),
        )
    }
}

fn vertex(x: &Vector, i: usize) -> nalgebra::Vector3<f64> {
    nalgebra::Vector3::new(x[3 * i], x[3 * i + 1], x[3 * i + 2])
}

/// Edge vector rescaled to length `l`; the zero vector maps to `l e1`.
pub fn project_edge(e: [f64; 3], l: f64) -> [f64; 3] {
    let norm = (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt();
    if norm == 0.0 {
        [l, 0.0, 0.0]
    } else {
        let k = l / norm;
        [e[0] * k, e[1] * k, e[2] * k]
    }
}

/// Nearest point on the sphere; the center maps to `center + radius e1`.
pub fn project_sphere(p: [f64; 3], center: [f64; 3], radius: f64) -> [f64; 3] {
    let d = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
    let e = project_edge(d, radius);
    [center[0] + e[0], center[1] + e[1], center[2] + e[2]]
}

/// `|‖e‖ - l| / l` for every edge of the mesh `x`.
pub fn edge_length_error(mesh_x: &Vector, spec: &WireMeshSpec) -> Vec<f64> {
    spec.edges()
        .iter()
        .map(|&(a, b)| {
            let len = (vertex(mesh_x, a) - vertex(mesh_x, b)).norm();
            (len - spec.edge_length).abs() / spec.edge_length
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct WireMeshProblem {
    spec: Arc<WireMeshSpec>,
    a: CscMatrix<f64>,
    /// `L^T L`, or `None` when `L = 0`.
    smooth_gram: Option<CscMatrix<f64>>,
    smooth: Option<CscMatrix<f64>>,
    /// `A^T A` and `L^T L x_ref`.
    a_gram: CscMatrix<f64>,
    smooth_rhs: Vector,
    factor: SpdFactor,
    beta: f64,
    offset: Vector,
    soft_rows: usize,
}

pub fn make_wire_mesh(spec: &WireMeshSpec) -> Result<WireMeshProblem, SolverError> {
    spec.validate()?;
    let nv = spec.vertices();
    let edges = spec.edges();
    let soft_rows = 3 * nv;
    let rows = soft_rows + 3 * edges.len();

    let mut triplets = Vec::with_capacity(3 * nv + 6 * edges.len());
    for i in 0..3 * nv {
        triplets.push((i, i, 1.0));
    }
    for (e, &(p, q)) in edges.iter().enumerate() {
        for k in 0..3 {
            triplets.push((soft_rows + 3 * e + k, 3 * q + k, 1.0));
            triplets.push((soft_rows + 3 * e + k, 3 * p + k, -1.0));
        }
    }
    let a = csc_from_triplets(rows, 3 * nv, triplets);
    let a_gram = &a.transpose() * &a;

    let (smooth, smooth_gram, smooth_rhs) = if spec.smoothness > 0.0 {
        let mut t = Vec::new();
        let mut degree = vec![0.0; nv];
        for &(p, q) in &edges {
            degree[p] += 1.0;
            degree[q] += 1.0;
            for k in 0..3 {
                t.push((3 * p + k, 3 * q + k, -spec.smoothness));
                t.push((3 * q + k, 3 * p + k, -spec.smoothness));
            }
        }
        for (i, d) in degree.iter().enumerate() {
            for k in 0..3 {
                t.push((3 * i + k, 3 * i + k, spec.smoothness * d));
            }
        }
        let l = csc_from_triplets(3 * nv, 3 * nv, t);
        let gram = &l.transpose() * &l;
        let rhs = spmv(&gram, &spec.reference);
        (Some(l), Some(gram), rhs)
    } else {
        (None, None, Vector::zeros(3 * nv))
    };

    let factor = factor_for(&a_gram, smooth_gram.as_ref(), spec.beta)?;
    Ok(WireMeshProblem {
        spec: Arc::new(spec.clone()),
        a,
        smooth_gram,
        smooth,
        a_gram,
        smooth_rhs,
        factor,
        beta: spec.beta,
        offset: Vector::zeros(rows),
        soft_rows,
    })
}

fn factor_for(
    a_gram: &CscMatrix<f64>,
    smooth_gram: Option<&CscMatrix<f64>>,
    weight: f64,
) -> Result<SpdFactor, SolverError> {
    let scaled = a_gram * weight;
    match smooth_gram {
        Some(g) => SpdFactor::new(&(g + &scaled)),
        None => SpdFactor::new(&scaled),
    }
}

impl WireMeshProblem {
    pub fn spec(&self) -> &WireMeshSpec {
        &self.spec
    }

    /// `x0 = x_ref`, `z0 = A x0`, `y0 = 0`.
    pub fn initial_state(&self) -> AdmmState {
        let x = self.spec.reference.clone();
        let z = self.apply_a(&x);
        let y = Vector::zeros(z.len());
        AdmmState::new(x, y, z)
    }
}

impl Problem for WireMeshProblem {
    fn dims(&self) -> Dims {
        Dims {
            x: self.a.ncols(),
            z: self.a.nrows(),
            constraints: self.a.nrows(),
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
            self.factor = factor_for(&self.a_gram, self.smooth_gram.as_ref(), beta)?;
            self.beta = beta;
        }
        Ok(())
    }

    fn solve_x(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError> {
        SolverError::check_dim("wire mesh solve_x", self.a.nrows(), target.len())?;
        let rhs = &self.smooth_rhs + spmv_transpose(&self.a, target) * weight;
        if weight == self.beta {
            Ok(self.factor.solve(&rhs))
        } else {
            Ok(factor_for(&self.a_gram, self.smooth_gram.as_ref(), weight)?.solve(&rhs))
        }
    }

    fn solve_z(&self, target: &Vector, weight: f64) -> Result<Vector, SolverError> {
        SolverError::check_dim("wire mesh solve_z", self.a.nrows(), target.len())?;
        let spec = &self.spec;
        let mut z = Vector::zeros(target.len());
        for (i, &w) in spec.soft_weights.iter().enumerate() {
            let t = [target[3 * i], target[3 * i + 1], target[3 * i + 2]];
            let p = project_sphere(t, spec.center, spec.radius);
            for k in 0..3 {
                z[3 * i + k] = (w * p[k] + weight * t[k]) / (w + weight);
            }
        }
        for j in (self.soft_rows..target.len()).step_by(3) {
            let e = project_edge([target[j], target[j + 1], target[j + 2]], spec.edge_length);
            z.as_mut_slice()[j..j + 3].copy_from_slice(&e);
        }
        Ok(z)
    }

    fn apply_a(&self, x: &Vector) -> Vector {
        spmv(&self.a, x)
    }

    fn apply_b(&self, z: &Vector) -> Vector {
        z.clone()
    }

    fn offset(&self) -> &Vector {
        &self.offset
    }

    fn eval_f(&self, x: &Vector) -> f64 {
        match &self.smooth {
            Some(l) => 0.5 * spmv(l, &(x - &self.spec.reference)).norm_squared(),
            None => 0.0,
        }
    }

    fn eval_g(&self, z: &Vector) -> f64 {
        let spec = &self.spec;
        let mut total = 0.0;
        for (i, &w) in spec.soft_weights.iter().enumerate() {
            let d = [
                z[3 * i] - spec.center[0],
                z[3 * i + 1] - spec.center[1],
                z[3 * i + 2] - spec.center[2],
            ];
            let dist = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() - spec.radius;
            total += 0.5 * w * dist * dist;
        }
        let tol = 1e-9 * spec.edge_length;
        for j in (self.soft_rows..z.len()).step_by(3) {
            let len = (z[j] * z[j] + z[j + 1] * z[j + 1] + z[j + 2] * z[j + 2]).sqrt();
            if (len - spec.edge_length).abs() > tol {
                return f64::INFINITY;
            }
        }
        total
    }

    fn apply_at(&self, r: &Vector) -> Option<Vector> {
        Some(spmv_transpose(&self.a, r))
    }

    fn apply_bt(&self, r: &Vector) -> Option<Vector> {
        Some(r.clone())
    }

    fn grad_f(&self, x: &Vector) -> Option<Vector> {
        Some(match &self.smooth_gram {
            Some(g) => spmv(g, x) - &self.smooth_rhs,
            None => Vector::zeros(x.len()),
        })
    }
}
