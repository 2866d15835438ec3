use super::merit::MeritKind;
use crate::error::SolverError;

/// Stopping rule for the iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `||G(s) - s|| < epsilon` on the accelerated variable.
    FixedPointResidual,
    /// Normalized combined residual `R < epsilon`.
    NormalizedCombinedResidual,
}

/// Penalty continuation: `beta` starts at `start` and is multiplied by
/// `growth` every `period` iterations until it reaches `cap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSchedule {
    pub start: f64,
    pub growth: f64,
    pub period: usize,
    pub cap: f64,
}

impl BetaSchedule {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.start > 0.0 && self.growth > 0.0 && self.cap > 0.0 && self.period > 0) {
            return Err(SolverError::InvalidConfig(format!(
                "invalid beta schedule {self:?}"
            )));
        }
        Ok(())
    }

    /// Penalty in force at (0-based) iteration `iteration`.
    ///
    /// Computed by repeated multiplication so every solver sees the same
    /// sequence of values bit for bit.
    pub fn beta_at(&self, iteration: usize) -> f64 {
        let steps = iteration / self.period;
        let mut beta = self.start.min(self.cap);
        for _ in 0..steps {
            if beta >= self.cap {
                break;
            }
            beta = (beta * self.growth).min(self.cap);
        }
        beta
    }
}

/// Parameters shared by every solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Anderson window.
    pub m: usize,
    pub merit: MeritKind,
    pub nu1: f64,
    pub nu2: f64,
    pub epsilon: f64,
    pub k_max: usize,
    pub termination: Termination,
    /// Scale `a` in `R = sqrt(r_c / (N_A a^2))`.
    pub norm_scale: f64,
    /// Tikhonov factor for the Anderson least-squares solve.
    pub anderson_regularization: f64,
    /// Evaluate the combined residual of every DR iterate (one extra x-solve).
    pub track_combined_residual: bool,
    /// Keep every evaluated iterate in the trace.
    pub record_iterates: bool,
    pub beta_schedule: Option<BetaSchedule>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            m: 6,
            merit: MeritKind::PrimalResidualNorm,
            nu1: 1e-3,
            nu2: 1e-3,
            epsilon: 1e-10,
            k_max: 1000,
            termination: Termination::FixedPointResidual,
            norm_scale: 1.0,
            anderson_regularization: 0.0,
            track_combined_residual: true,
            record_iterates: false,
            beta_schedule: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidConfig(msg.to_string()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.nu1 >= 0.0 && self.nu2 >= 0.0) {
            return bad("nu1 and nu2 must be nonnegative");
        }
        if !(self.norm_scale > 0.0) {
            return bad("norm_scale must be positive");
        }
        if !(self.anderson_regularization >= 0.0) {
            return bad("anderson_regularization must be nonnegative");
        }
        if self.termination == Termination::NormalizedCombinedResidual
            && !self.track_combined_residual
        {
            return bad("normalized termination needs track_combined_residual");
        }
        if let Some(schedule) = &self.beta_schedule {
            schedule.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_window_is_six() {
        assert_eq!(SolverConfig::default().m, 6);
    }

    #[test]
    fn schedule_steps() {
        let s = BetaSchedule {
            start: 5.0,
            growth: 1.03,
            period: 5,
            cap: 1000.0,
        };
        for k in 0..5 {
            assert_eq!(s.beta_at(k), 5.0);
        }
        for k in 5..10 {
            assert_eq!(s.beta_at(k), 5.0 * 1.03);
        }
        assert_eq!(s.beta_at(100_000), 1000.0);
    }

    #[test]
    fn rejects_bad_config() {
        let bad = [
            SolverConfig {
                epsilon: 0.0,
                ..SolverConfig::default()
            },
            SolverConfig {
                norm_scale: -1.0,
                ..SolverConfig::default()
            },
            SolverConfig {
                nu1: f64::NAN,
                ..SolverConfig::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err());
        }
    }
}
