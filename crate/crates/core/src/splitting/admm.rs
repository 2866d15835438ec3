//! Baselines: plain ADMM and Anderson-accelerated ADMM on the primal/dual pair.
//!
//! Both start with one unrecorded ADMM step from the initial state, so that
//! every recorded combined residual compares two genuine ADMM iterates. From a
//! consistent start (`A x0 = B z0 + c`) the first recorded residual is the one
//! the DR solver reports for `s0 = A x0 - y0`.

use super::config::{SolverConfig, Termination};
use super::problem::Problem;
use super::residual::{normalize_residual, residuals_admm};
use super::state::{admm_step, AdmmState};
use super::trace::{IterationRecord, IterationTrace, Stopwatch};
use super::{SolveFailure, SolveOutput};
use crate::anderson::AndersonBuffer;
use crate::error::SolverError;
use crate::Vector;

fn start(
    problem: &mut dyn Problem,
    config: &SolverConfig,
    init: &AdmmState,
) -> Result<AdmmState, SolverError> {
    config.validate()?;
    init.check_dims(problem)?;
    if let Some(schedule) = &config.beta_schedule {
        problem.set_beta(schedule.beta_at(0))?;
    }
    admm_step(init, problem)
}

/// Applies the penalty schedule before iteration `index`, rescaling the
/// scaled dual so the unscaled multiplier is unchanged. Returns true when
/// `beta` changed.
fn apply_schedule(
    problem: &mut dyn Problem,
    config: &SolverConfig,
    index: usize,
    y: &mut Vector,
) -> Result<bool, SolverError> {
    let Some(schedule) = &config.beta_schedule else {
        return Ok(false);
    };
    let target = schedule.beta_at(index);
    let current = problem.beta();
    if target == current {
        return Ok(false);
    }
    *y *= current / target;
    problem.set_beta(target)?;
    Ok(true)
}

/// Plain ADMM until the normalized combined residual drops below `epsilon`
/// or `k_max` iterations have been recorded.
pub fn admm_solve(
    problem: &mut dyn Problem,
    config: &SolverConfig,
    init: &AdmmState,
) -> Result<SolveOutput, SolveFailure> {
    let mut trace = IterationTrace::default();
    let mut state = match start(problem, config, init) {
        Ok(s) => s,
        Err(error) => return Err(SolveFailure { error, trace }),
    };
    let clock = Stopwatch::start();
    let mut converged = false;
    let mut normalized = f64::INFINITY;

    for k in 1..=config.k_max {
        let step = apply_schedule(problem, config, k - 1, &mut state.y)
            .and_then(|_| admm_step(&state, problem));
        let next = match step {
            Ok(n) => n,
            Err(error) => return Err(SolveFailure { error, trace }),
        };
        let report = residuals_admm(&state, &next, problem, config.norm_scale);
        normalized = report.normalized;
        let primal_gap = (problem.apply_a(&next.x) - problem.apply_b_shifted(&next.z)).norm();
        let prev_merit = trace.records.last().map_or(f64::INFINITY, |r| r.merit);
        trace.records.push(IterationRecord {
            iter: k,
            accepted_count: k,
            seconds: clock.seconds(),
            merit: report.combined,
            decrease: report.combined - prev_merit,
            accepted: true,
            forced: false,
            combined: report.combined,
            normalized,
            primal_gap,
            beta: problem.beta(),
            history_len: 0,
            iterate: config.record_iterates.then(|| state.x.clone()),
        });
        state = next;
        if normalized < config.epsilon {
            converged = true;
            break;
        }
    }

    let iterations = trace.len();
    Ok(SolveOutput {
        x: state.x,
        y: state.y,
        z: state.z,
        s: None,
        trace,
        converged,
        iterations,
        final_residual: normalized,
    })
}

fn concat(a: &Vector, b: &Vector) -> Vector {
    Vector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

fn split(w: &Vector, nx: usize) -> (Vector, Vector) {
    (
        w.rows(0, nx).into_owned(),
        w.rows(nx, w.len() - nx).into_owned(),
    )
}

/// One z, x, y sweep from `(x, y)`.
struct Sweep {
    x_next: Vector,
    y_next: Vector,
    combined: f64,
    primal_gap: f64,
}

fn sweep(problem: &dyn Problem, x: &Vector, y: &Vector) -> Result<Sweep, SolverError> {
    let beta = problem.beta();
    let ax = problem.apply_a(x);
    let z = problem.solve_z(&(&ax + y), beta)?;
    let bz_c = problem.apply_b_shifted(&z);
    let x_next = problem.solve_x(&(&bz_c - y), beta)?;
    let ax_next = problem.apply_a(&x_next);
    let primal = &ax_next - &bz_c;
    let y_next = y + &ax_next - &bz_c;
    let combined = beta * primal.norm_squared() + beta * (&ax_next - &ax).norm_squared();
    Ok(Sweep {
        x_next,
        y_next,
        combined,
        primal_gap: primal.norm(),
    })
}

/// Anderson acceleration of ADMM viewed as a fixed-point map on `(x, y)`,
/// guarded by the combined residual: a candidate is accepted when its
/// combined residual does not exceed that of the last accepted iterate.
pub fn aa_admm_solve(
    problem: &mut dyn Problem,
    config: &SolverConfig,
    init: &AdmmState,
) -> Result<SolveOutput, SolveFailure> {
    let mut trace = IterationTrace::default();
    let first = match start(problem, config, init) {
        Ok(s) => s,
        Err(error) => return Err(SolveFailure { error, trace }),
    };
    let nx = first.x.len();
    let clock = Stopwatch::start();
    let mut buffer = AndersonBuffer::new(config.m, config.anderson_regularization);

    let mut w = concat(&first.x, &first.y);
    // (image, merit) of the last accepted candidate.
    let mut last: Option<(Vector, f64)> = None;
    let mut last_solution: Option<(Vector, Vector)> = None;
    let mut reset = true;
    let mut plain_candidate = true;
    let mut k = 0usize;
    let mut converged = false;
    let mut final_residual = f64::INFINITY;

    loop {
        if let Some((image, _)) = &last {
            let (x_img, mut y_img) = split(image, nx);
            match apply_schedule(problem, config, k, &mut y_img) {
                Ok(true) => {
                    w = concat(&x_img, &y_img);
                    buffer.reset();
                    reset = true;
                    plain_candidate = true;
                }
                Ok(false) => {}
                Err(error) => return Err(SolveFailure { error, trace }),
            }
        }

        let (x, y) = split(&w, nx);
        let sw = match sweep(problem, &x, &y) {
            Ok(sw) => sw,
            Err(error) => return Err(SolveFailure { error, trace }),
        };
        let merit = sw.combined;
        let prev_merit = last.as_ref().map_or(f64::INFINITY, |(_, m)| *m);
        let d = merit - prev_merit;
        let forced = reset || plain_candidate;
        let accepted = forced || (merit.is_finite() && d <= 0.0);
        let normalized = normalize_residual(merit, problem.dims().constraints, config.norm_scale);
        let iterate = config.record_iterates.then(|| w.clone());

        if accepted {
            let image = concat(&sw.x_next, &sw.y_next);
            let residual = &image - &w;
            let fp_residual = residual.norm();
            let next = match buffer.push_and_accelerate(image.clone(), residual) {
                Ok(n) => n,
                Err(error) => return Err(SolveFailure { error, trace }),
            };
            plain_candidate = buffer.effective_depth() == 0;
            last = Some((image, merit));
            last_solution = Some((sw.x_next, sw.y_next));
            reset = false;
            k += 1;
            w = next;
            converged = match config.termination {
                Termination::FixedPointResidual => fp_residual < config.epsilon,
                Termination::NormalizedCombinedResidual => normalized < config.epsilon,
            };
            final_residual = match config.termination {
                Termination::FixedPointResidual => fp_residual,
                Termination::NormalizedCombinedResidual => normalized,
            };
        } else {
            w = last
                .as_ref()
                .expect("a rejection follows an accepted iterate")
                .0
                .clone();
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
            combined: merit,
            normalized,
            primal_gap: sw.primal_gap,
            beta: problem.beta(),
            history_len: buffer.len(),
            iterate,
        });

        if converged || k >= config.k_max {
            break;
        }
    }

    let (x, y) = last_solution.expect("the first evaluation is always accepted");
    // Finish the sweep so (x, y, z) is a complete ADMM iterate.
    let z = match problem.solve_z(&(problem.apply_a(&x) + &y), problem.beta()) {
        Ok(z) => z,
        Err(error) => return Err(SolveFailure { error, trace }),
    };
    Ok(SolveOutput {
        x,
        y,
        z,
        s: None,
        trace,
        converged,
        iterations: k,
        final_residual,
    })
}
