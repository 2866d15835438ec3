use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid problem data: {0}")]
    InvalidProblem(String),

    #[error("sub-problem solver failed: {0}")]
    SubSolver(String),

    #[error("matrix factorization failed: {0}")]
    Factorization(String),
}

impl SolverError {
    pub(crate) fn check_dim(
        context: &'static str,
        expected: usize,
        found: usize,
    ) -> Result<(), SolverError> {
        if expected == found {
            Ok(())
        } else {
            Err(SolverError::Dimension {
                context,
                expected,
                found,
            })
        }
    }
}
