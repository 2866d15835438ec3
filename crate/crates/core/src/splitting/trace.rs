use std::time::Instant;

use crate::error::SolverError;
use crate::Vector;

/// One evaluated iterate.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based evaluation index.
    pub iter: usize,
    /// Accepted iterations so far, including this one if accepted.
    pub accepted_count: usize,
    /// Seconds since the solve started.
    pub seconds: f64,
    pub merit: f64,
    /// `merit - previous accepted merit`.
    pub decrease: f64,
    pub accepted: bool,
    /// Accepted without the merit test (bootstrap, after a rejection, or an
    /// un-extrapolated candidate).
    pub forced: bool,
    /// Combined residual `r_c`; NaN when not tracked.
    pub combined: f64,
    /// Normalized combined residual `R`; NaN when not tracked.
    pub normalized: f64,
    /// `||v - u||`, the primal residual norm.
    pub primal_gap: f64,
    pub beta: f64,
    /// Anderson history length after this evaluation.
    pub history_len: usize,
    /// The evaluated iterate when `record_iterates` is on.
    pub iterate: Option<Vector>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn accepted_count(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }

    pub fn rejected_count(&self) -> usize {
        self.records.iter().filter(|r| !r.accepted).count()
    }

    /// Index (1-based) of the first evaluation with `R < threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.normalized < threshold)
            .map(|r| r.iter)
    }

    /// Merit values of accepted evaluations, in order.
    pub fn accepted_merits(&self) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.accepted)
            .map(|r| r.merit)
            .collect()
    }

    /// Recomputes `R = sqrt(r_c / (rows a^2))` for every record.
    pub fn normalize(&mut self, rows: usize, scale: f64) -> Result<(), SolverError> {
        if rows == 0 || !(scale > 0.0) {
            return Err(SolverError::InvalidConfig(format!(
                "normalization needs rows > 0 and a > 0, got rows = {rows}, a = {scale}"
            )));
        }
        for r in &mut self.records {
            r.normalized = super::residual::normalize_residual(r.combined, rows, scale);
        }
        Ok(())
    }
}

/// Monotonic clock anchored at solve start.
#[derive(Debug)]
pub(crate) struct Stopwatch(Instant);

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Self(Instant::now())
    }

    pub(crate) fn seconds(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}
