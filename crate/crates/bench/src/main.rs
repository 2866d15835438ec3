use std::path::PathBuf;
use std::process::ExitCode;

use aadr_bench::{run, BenchConfig, BenchError, Overrides};
use clap::Parser;

/// Runs splitting solvers on a benchmark problem and writes per-solver CSV
/// traces and a summary.
#[derive(Debug, Parser)]
#[command(name = "aadr-bench", version)]
struct Cli {
    /// Flat JSON config file; flags override its fields.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// quadratic, logistic, wire-mesh or lp-box.
    #[arg(long, value_name = "NAME")]
    problem: Option<String>,
    /// Solver to run; repeat for several.
    #[arg(long = "solver", value_name = "NAME")]
    solvers: Vec<String>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Threshold on the normalized combined residual R.
    #[arg(long, value_name = "X")]
    eps: Option<f64>,
    #[arg(long, value_name = "N")]
    kmax: Option<usize>,
    /// Anderson window.
    #[arg(long, value_name = "N")]
    m: Option<usize>,
    /// Grayscale grid file for lp-box ("H W" header, then H*W values).
    #[arg(long, value_name = "PATH")]
    image: Option<PathBuf>,
}

fn fail(e: &BenchError) -> ExitCode {
    eprintln!("aadr-bench: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut config = match &cli.config {
        Some(path) => match BenchConfig::load(path) {
            Ok(c) => c,
            Err(e) => return fail(&e),
        },
        None => BenchConfig::default(),
    };
    config.apply(Overrides {
        problem: cli.problem,
        solvers: cli.solvers,
        out: cli.out,
        seed: cli.seed,
        epsilon: cli.eps,
        k_max: cli.kmax,
        m: cli.m,
        image: cli.image,
    });

    match run(&config) {
        Ok(summary) => {
            print!("{}", summary.to_text());
            if summary.any_failed() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => fail(&e),
    }
}
