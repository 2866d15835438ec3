//! Small sparse helpers shared by the problem builders.

use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::error::SolverError;
use crate::Vector;

/// Prefactorized symmetric positive-definite matrix, reused across solves.
#[derive(Clone)]
pub struct SpdFactor {
    factor: CscCholesky<f64>,
    dim: usize,
}

impl std::fmt::Debug for SpdFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpdFactor").field("dim", &self.dim).finish()
    }
}

impl SpdFactor {
    pub fn new(matrix: &CscMatrix<f64>) -> Result<Self, SolverError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(SolverError::Factorization(format!(
                "matrix is {}x{}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let factor = CscCholesky::factor(matrix)
            .map_err(|e| SolverError::Factorization(format!("{e:?}")))?;
        Ok(Self {
            factor,
            dim: matrix.nrows(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn solve(&self, rhs: &Vector) -> Vector {
        let b = DMatrix::from_column_slice(rhs.len(), 1, rhs.as_slice());
        let x = self.factor.solve(&b);
        Vector::from_column_slice(x.as_slice())
    }
}

/// `y = M x` for a CSC matrix.
pub fn spmv(matrix: &CscMatrix<f64>, x: &Vector) -> Vector {
    let mut y = Vector::zeros(matrix.nrows());
    for (col, lane) in matrix.col_iter().enumerate() {
        let xc = x[col];
        if xc == 0.0 {
            continue;
        }
        for (&row, &val) in lane.row_indices().iter().zip(lane.values()) {
            y[row] += val * xc;
        }
    }
    y
}

/// `y = M^T x` for a CSC matrix.
pub fn spmv_transpose(matrix: &CscMatrix<f64>, x: &Vector) -> Vector {
    let mut y = Vector::zeros(matrix.ncols());
    for (col, lane) in matrix.col_iter().enumerate() {
        y[col] = lane
            .row_indices()
            .iter()
            .zip(lane.values())
            .map(|(&row, &val)| val * x[row])
            .sum();
    }
    y
}

/// Builds a CSC matrix from `(row, col, value)` triplets; duplicates are summed.
pub fn csc_from_triplets(
    nrows: usize,
    ncols: usize,
    triplets: impl IntoIterator<Item = (usize, usize, f64)>,
) -> CscMatrix<f64> {
    let mut coo = CooMatrix::new(nrows, ncols);
    for (r, c, v) in triplets {
        coo.push(r, c, v);
    }
    CscMatrix::from(&coo)
}
