//! Runs the solver matrix and writes traces and the summary.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use aadr::{IterationTrace, SolverConfig, SolverRegistry, Termination};

use crate::config::BenchConfig;
use crate::instance::Instance;
use crate::BenchError;

/// Outcome of one solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub solver: String,
    /// Row index of the first `R < epsilon`.
    pub iterations_to_eps: Option<usize>,
    pub evaluations: usize,
    pub wall_seconds: f64,
    pub final_r: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub final_objective: f64,
    pub converged: bool,
    /// Error message when the solve failed.
    pub failure: Option<String>,
    pub extras: Vec<(&'static str, String)>,
    pub trace: IterationTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub problem: String,
    pub seed: u64,
    pub scale: f64,
    pub rows: usize,
    pub solvers: Vec<SolverSummary>,
}

impl RunSummary {
    pub fn any_failed(&self) -> bool {
        self.solvers.iter().any(|s| s.failure.is_some())
    }

    /// `key: value` lines, one block of `solver.key` entries per solver.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "problem: {}", self.problem);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "a: {:?}", self.scale);
        let _ = writeln!(out, "N_A: {}", self.rows);
        for s in &self.solvers {
            let n = &s.solver;
            let status = match &s.failure {
                None => "ok".to_string(),
                Some(msg) => format!("failed: {msg}"),
            };
            let _ = writeln!(out, "{n}.status: {status}");
            let iters = s
                .iterations_to_eps
                .map_or("none".to_string(), |k| k.to_string());
            let _ = writeln!(out, "{n}.iterations_to_eps: {iters}");
            let _ = writeln!(out, "{n}.evaluations: {}", s.evaluations);
            let _ = writeln!(out, "{n}.wall_seconds: {:?}", s.wall_seconds);
            let _ = writeln!(out, "{n}.final_R: {:?}", s.final_r);
            let _ = writeln!(out, "{n}.accepted: {}", s.accepted);
            let _ = writeln!(out, "{n}.rejected: {}", s.rejected);
            let _ = writeln!(out, "{n}.final_objective: {:?}", s.final_objective);
            let _ = writeln!(out, "{n}.converged: {}", s.converged);
            for (k, v) in &s.extras {
                let _ = writeln!(out, "{n}.{k}: {v}");
            }
        }
        out
    }
}

/// Recomputes the `R` column as `sqrt(r_c / (rows a^2))`.
pub fn normalize_trace(
    trace: &IterationTrace,
    rows: usize,
    scale: f64,
) -> Result<IterationTrace, BenchError> {
    let mut t = trace.clone();
    t.normalize(rows, scale)
        .map_err(|e| BenchError::Usage(e.to_string()))?;
    Ok(t)
}

/// CSV with columns `iter,seconds,r_c,R,merit,accepted`.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::from("iter,seconds,r_c,R,merit,accepted\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{:?},{:?},{:?},{:?},{}",
            r.iter, r.seconds, r.combined, r.normalized, r.merit, r.accepted as u8
        );
    }
    out
}

/// Writes `contents` to a temporary file in the target directory, then
/// renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), BenchError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let io = |e: std::io::Error| BenchError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn solver_config(config: &BenchConfig, instance: &Instance) -> SolverConfig {
    SolverConfig {
        m: config.m,
        nu1: config.nu1,
        nu2: config.nu2,
        epsilon: config.epsilon,
        k_max: config.k_max,
        termination: Termination::NormalizedCombinedResidual,
        norm_scale: config.scale.unwrap_or_else(|| instance.default_scale()),
        anderson_regularization: config.anderson_regularization,
        beta_schedule: instance.schedule(),
        ..SolverConfig::default()
    }
}

fn run_one(
    config: &BenchConfig,
    registry: &SolverRegistry,
    name: &str,
) -> Result<SolverSummary, BenchError> {
    let mut instance = Instance::build(config)?;
    let init = instance.initial_state();
    let cfg = solver_config(config, &instance);
    let solver = registry
        .build(name, &cfg)
        .ok_or_else(|| BenchError::Usage(format!("unknown solver {name:?}")))?;
    let result = solver.solve(instance.problem_mut(), &init);
    let summary = match result {
        Ok(out) => {
            let p = instance.problem();
            SolverSummary {
                solver: name.to_string(),
                iterations_to_eps: out.trace.first_below(config.epsilon),
                evaluations: out.trace.len(),
                wall_seconds: out.trace.records.last().map_or(0.0, |r| r.seconds),
                final_r: out.final_residual,
                accepted: out.trace.accepted_count(),
                rejected: out.trace.rejected_count(),
                final_objective: p.eval_f(&out.x) + p.eval_g(&out.z),
                converged: out.converged,
                failure: None,
                extras: instance.extras(&out),
                trace: out.trace,
            }
        }
        Err(fail) => SolverSummary {
            solver: name.to_string(),
            iterations_to_eps: fail.trace.first_below(config.epsilon),
            evaluations: fail.trace.len(),
            wall_seconds: fail.trace.records.last().map_or(0.0, |r| r.seconds),
            final_r: fail.trace.records.last().map_or(f64::NAN, |r| r.normalized),
            accepted: fail.trace.accepted_count(),
            rejected: fail.trace.rejected_count(),
            final_objective: f64::NAN,
            converged: false,
            failure: Some(fail.error.to_string()),
            extras: Vec::new(),
            trace: fail.trace,
        },
    };
    Ok(summary)
}

/// Runs every configured solver from the same starting point and writes
/// `<problem>_<solver>.csv` plus `summary.txt` into `config.out`.
pub fn run(config: &BenchConfig) -> Result<RunSummary, BenchError> {
    let registry = SolverRegistry::with_builtins();
    config.validate(&registry.names())?;
    let probe = Instance::build(config)?;
    let rows = probe.problem().dims().constraints;
    let scale = config.scale.unwrap_or_else(|| probe.default_scale());

    let results: Vec<Result<SolverSummary, BenchError>> = if config.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = config
                .solvers
                .iter()
                .map(|name| scope.spawn(|| run_one(config, &registry, name)))
                .collect();
            handles
                .into_iter()
                .map(|h| {
                    h.join()
                        .unwrap_or_else(|_| Err(BenchError::Io("solver thread panicked".into())))
                })
                .collect()
        })
    } else {
        config
            .solvers
            .iter()
            .map(|name| run_one(config, &registry, name))
            .collect()
    };
    let solvers = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    std::fs::create_dir_all(&config.out)
        .map_err(|e| BenchError::Io(format!("{}: {e}", config.out.display())))?;
    for s in &solvers {
        let path: PathBuf = config
            .out
            .join(format!("{}_{}.csv", config.problem, s.solver));
        write_atomic(&path, &trace_csv(&s.trace))?;
    }
    let summary = RunSummary {
        problem: config.problem.clone(),
        seed: config.seed,
        scale,
        rows,
        solvers,
    };
    write_atomic(&config.out.join("summary.txt"), &summary.to_text())?;
    Ok(summary)
}
