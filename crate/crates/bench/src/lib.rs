//! Benchmark harness: runs solver x problem matrices and records traces.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod instance;
pub mod run;

use thiserror::Error;

pub use config::{BenchConfig, Overrides};
pub use run::{normalize_trace, run, trace_csv, RunSummary, SolverSummary};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl BenchError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) => 1,
            BenchError::Io(_) => 2,
        }
    }
}
