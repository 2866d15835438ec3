//! Anderson acceleration of ADMM through its DR splitting form, with a
//! merit-function safeguard.

use super::config::{SolverConfig, Termination};
use super::merit::accept;
use super::problem::Problem;
use super::residual::combined_residual_dr;
use super::state::{dr_step, recover, AdmmState, DrState};
use super::trace::{IterationRecord, IterationTrace, Stopwatch};
use super::{SolveFailure, SolveOutput};
use crate::anderson::AndersonBuffer;
use crate::Vector;

/// Last accepted iterate and what it produced.
struct Accepted {
    state: DrState,
    /// Plain DR image `G(s_default)`.
    image: Vector,
    merit: f64,
}

/// Runs the safeguarded accelerated DR iteration from `init`.
///
/// Each evaluation performs one DR step at the current candidate `s` and
/// computes its merit. A candidate is accepted when the history was just
/// reset, when it is an un-extrapolated DR image, or when the merit test
/// passes; the accelerated iterate for the next evaluation is then formed from
/// the new image. A rejected candidate sends the iteration back to the plain
/// image of the last accepted iterate and clears the Anderson history.
///
/// `k_max` bounds the number of accepted iterations. The returned `(x, z)` are
/// the minimizers cached at the last accepted iterate, `y = u - s` there.
pub fn aadr_solve(
    problem: &mut dyn Problem,
    config: &SolverConfig,
    init: &AdmmState,
) -> Result<SolveOutput, SolveFailure> {
    let mut trace = IterationTrace::default();
    let fail = |error, trace| SolveFailure { error, trace };
    if let Err(e) = config.validate().and_then(|_| init.check_dims(problem)) {
        return Err(fail(e, trace));
    }
    if let Some(schedule) = &config.beta_schedule {
        if let Err(e) = problem.set_beta(schedule.beta_at(0)) {
            return Err(fail(e, trace));
        }
    }

    let clock = Stopwatch::start();
    let mut buffer = AndersonBuffer::new(config.m, config.anderson_regularization);
    let mut s = problem.apply_a(&init.x) - &init.y;
    let mut last: Option<Accepted> = None;
    // Fixed-point residual ||G(s_default) - s_default|| of the last accepted iterate.
    let mut r = f64::INFINITY;
    let mut reset = true;
    let mut plain_candidate = true;
    let mut k = 0usize;
    let mut converged = false;

    loop {
        if let (Some(schedule), Some(acc)) = (&config.beta_schedule, &last) {
            let target = schedule.beta_at(k);
            let current = problem.beta();
            if target != current {
                // Keep the unscaled multiplier beta * y fixed across the change
                // and continue from the plain next iterate.
                let y = &acc.state.u - &acc.state.s;
                s = &acc.state.v - y * (current / target);
                if let Err(e) = problem.set_beta(target) {
                    return Err(fail(e, trace));
                }
                buffer.reset();
                reset = true;
                plain_candidate = true;
            }
        }

        let state = match dr_step(&s, problem) {
            Ok(st) => st,
            Err(e) => return Err(fail(e, trace)),
        };
        let merit = config.merit.evaluate(&state, problem);
        let prev_merit = last.as_ref().map_or(f64::INFINITY, |a| a.merit);
        let d = merit - prev_merit;

        let forced = reset || plain_candidate;
        let passed = merit.is_finite() && {
            let step_aa = last.as_ref().map_or(0.0, |a| (&s - &a.state.s).norm());
            accept(d, config.merit, config.nu1, config.nu2, r, step_aa)
        };
        let accepted = forced || passed;

        let (combined, normalized) = if config.track_combined_residual {
            match combined_residual_dr(&state, problem, config.norm_scale) {
                Ok(v) => v,
                Err(e) => return Err(fail(e, trace)),
            }
        } else {
            (f64::NAN, f64::NAN)
        };
        let primal_gap = (&state.v - &state.u).norm();
        let iterate = config.record_iterates.then(|| s.clone());

        if accepted {
            let image = state.next();
            let residual = &image - &state.s;
            r = residual.norm();
            let next = match buffer.push_and_accelerate(image.clone(), residual) {
                Ok(next) => next,
                Err(e) => return Err(fail(e, trace)),
            };
            plain_candidate = buffer.effective_depth() == 0;
            last = Some(Accepted {
                state,
                image,
                merit,
            });
            reset = false;
            k += 1;
            s = next;
        } else {
            let acc = last
                .as_ref()
                .expect("a rejection follows an accepted iterate");
            s = acc.image.clone();
            buffer.reset();
            reset = true;
            plain_candidate = true;
        }

        trace.records.push(IterationRecord {
            iter: trace.records.len() + 1,
            accepted_count: k,
            seconds: clock.seconds(),
            merit,
            decrease: d,
            accepted,
            forced: accepted && forced,
            combined,
            normalized,
            primal_gap,
            beta: problem.beta(),
            history_len: buffer.len(),
            iterate,
        });

        if accepted {
            converged = match config.termination {
                Termination::FixedPointResidual => r < config.epsilon,
                Termination::NormalizedCombinedResidual => normalized < config.epsilon,
            };
        }
        if converged || k >= config.k_max {
            break;
        }
    }

    let acc = last.expect("the first evaluation is always accepted");
    let solution = recover(&acc.state.s, &acc.state);
    let final_residual = match config.termination {
        Termination::FixedPointResidual => r,
        Termination::NormalizedCombinedResidual => trace
            .records
            .iter()
            .rev()
            .find(|rec| rec.accepted)
            .map_or(f64::NAN, |rec| rec.normalized),
    };
    Ok(SolveOutput {
        x: solution.x,
        y: solution.y,
        z: solution.z,
        s: Some(acc.state.s),
        trace,
        converged,
        iterations: k,
        final_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::quadratic::{make_quadratic, QuadraticConsensusSpec};
    use crate::splitting::MeritKind;

    fn toy(beta: f64, cf: f64) -> crate::problems::QuadraticProblem {
        make_quadratic(&QuadraticConsensusSpec::scalar(1.0, 3.0, cf, 1.0, beta))
            .unwrap()
            .problem
    }

    fn zero_init() -> AdmmState {
        let z = Vector::zeros(1);
        AdmmState::new(z.clone(), z.clone(), z)
    }

    #[test]
    fn toy_converges_in_three_evaluations() {
        let mut p = toy(1.0, 1.0);
        let cfg = SolverConfig {
            m: 1,
            epsilon: 1e-12,
            record_iterates: true,
            ..SolverConfig::default()
        };
        let out = aadr_solve(&mut p, &cfg, &zero_init()).unwrap();
        let seq: Vec<f64> = out
            .trace
            .records
            .iter()
            .map(|r| r.iterate.as_ref().unwrap()[0])
            .collect();
        assert_eq!(seq, vec![0.0, 1.5, 3.0]);
        assert!(out.converged);
        assert_eq!(out.final_residual, 0.0);
        assert_eq!((out.x[0], out.y[0], out.z[0]), (2.0, -1.0, 2.0));
    }

    #[test]
    fn depth_zero_is_plain_dr() {
        let mut p = toy(1.0, 1.0);
        let cfg = SolverConfig {
            m: 0,
            k_max: 40,
            epsilon: 1e-300,
            record_iterates: true,
            ..SolverConfig::default()
        };
        let out = aadr_solve(&mut p, &cfg, &zero_init()).unwrap();
        let mut s = Vector::zeros(1);
        for rec in &out.trace.records {
            assert!(rec.accepted);
            assert_eq!(rec.iterate.as_ref().unwrap(), &s);
            s = dr_step(&s, &p).unwrap().next();
        }
        assert_eq!(out.trace.len(), 40);
    }

    #[test]
    fn envelope_merit_decreases_to_limit() {
        let mut p = toy(4.0, 2.0);
        let cfg = SolverConfig {
            merit: MeritKind::DrEnvelope,
            epsilon: 1e-13,
            ..SolverConfig::default()
        };
        let out = aadr_solve(&mut p, &cfg, &zero_init()).unwrap();
        let merits = out.trace.accepted_merits();
        assert!(merits.windows(2).all(|w| w[1] <= w[0]));
        assert!((merits.last().unwrap() - 4.0 / 3.0).abs() < 1e-10);
        assert!(out.converged);
    }

    #[test]
    fn respects_k_max() {
        let mut p = toy(1.0, 1.0);
        let cfg = SolverConfig {
            m: 0,
            k_max: 5,
            epsilon: 1e-300,
            ..SolverConfig::default()
        };
        let out = aadr_solve(&mut p, &cfg, &zero_init()).unwrap();
        assert_eq!(out.iterations, 5);
        assert!(!out.converged);
    }

    #[test]
    fn rejects_bad_input() {
        let mut p = toy(1.0, 1.0);
        let bad = AdmmState::new(Vector::zeros(2), Vector::zeros(1), Vector::zeros(1));
        let err = aadr_solve(&mut p, &SolverConfig::default(), &bad).unwrap_err();
        assert!(err.trace.is_empty());
        let cfg = SolverConfig {
            epsilon: -1.0,
            ..SolverConfig::default()
        };
        assert!(aadr_solve(&mut p, &cfg, &zero_init()).is_err());
    }
}
