//! Builds the configured problem and its starting point.

use aadr::problems::lp_box::{make_lp_box, LpBoxProblem, LpBoxSpec};
use aadr::problems::wire_mesh::{edge_length_error, make_wire_mesh, WireMeshProblem, WireMeshSpec};
use aadr::problems::{
    gen_logistic_data, make_lq_logistic, make_quadratic, two_region_image, Grid, LqLogisticProblem,
    QuadraticConsensusSpec, QuadraticProblem,
};
use aadr::splitting::AdmmState;
use aadr::{BetaSchedule, Problem, SolveOutput, SolverError};

use crate::config::BenchConfig;
use crate::BenchError;

pub enum Instance {
    Quadratic(QuadraticProblem),
    Logistic(LqLogisticProblem),
    WireMesh(Box<WireMeshProblem>),
    LpBox {
        problem: Box<LpBoxProblem>,
        /// Ground-truth foreground mask of the synthetic image.
        truth: Option<Vec<bool>>,
        seed: u64,
    },
}

fn invalid(e: SolverError) -> BenchError {
    BenchError::Usage(e.to_string())
}

impl Instance {
    pub fn build(config: &BenchConfig) -> Result<Self, BenchError> {
        match config.problem.as_str() {
            "quadratic" => {
                let spec = QuadraticConsensusSpec::scalar(
                    config.target_a,
                    config.target_b,
                    config.curvature_f,
                    config.curvature_g,
                    config.beta.unwrap_or(1.0),
                );
                Ok(Self::Quadratic(
                    make_quadratic(&spec).map_err(invalid)?.problem,
                ))
            }
            "logistic" => {
                if config.features < 2 || config.samples < 2 {
                    return Err(BenchError::Usage(
                        "features and samples must be at least 2".into(),
                    ));
                }
                let mut spec = gen_logistic_data(config.features, config.samples, config.seed);
                spec.lambda = config.lambda;
                if let Some(b) = config.beta {
                    spec.beta = b;
                }
                Ok(Self::Logistic(make_lq_logistic(&spec).map_err(invalid)?))
            }
            "wire-mesh" => {
                let mut spec = WireMeshSpec::sphere_patch(
                    config.mesh_rows,
                    config.mesh_cols,
                    config.mesh_span,
                );
                spec.smoothness = config.mesh_smoothness;
                if let Some(b) = config.beta {
                    spec.beta = b;
                }
                Ok(Self::WireMesh(Box::new(
                    make_wire_mesh(&spec).map_err(invalid)?,
                )))
            }
            "lp-box" => {
                let (image, truth) = match &config.image {
                    Some(path) => {
                        let text = std::fs::read_to_string(path).map_err(|e| {
                            BenchError::Usage(format!("cannot read {}: {e}", path.display()))
                        })?;
                        (Grid::parse(&text).map_err(invalid)?, None)
                    }
                    None => {
                        let (g, mask) = two_region_image(
                            config.image_size,
                            config.image_size,
                            config.image_noise,
                            config.seed,
                        );
                        (g, Some(mask))
                    }
                };
                let mut spec = LpBoxSpec::from_image(image, config.smoothness, config.sigma)
                    .map_err(invalid)?;
                if let Some(b) = config.beta {
                    spec.schedule.start = b;
                }
                Ok(Self::LpBox {
                    problem: Box::new(make_lp_box(&spec).map_err(invalid)?),
                    truth,
                    seed: config.seed,
                })
            }
            other => Err(BenchError::Usage(format!("unknown problem {other:?}"))),
        }
    }

    pub fn problem(&self) -> &dyn Problem {
        match self {
            Self::Quadratic(p) => p,
            Self::Logistic(p) => p,
            Self::WireMesh(p) => p.as_ref(),
            Self::LpBox { problem, .. } => problem.as_ref(),
        }
    }

    pub fn problem_mut(&mut self) -> &mut dyn Problem {
        match self {
            Self::Quadratic(p) => p,
            Self::Logistic(p) => p,
            Self::WireMesh(p) => p.as_mut(),
            Self::LpBox { problem, .. } => problem.as_mut(),
        }
    }

    /// Shared starting point; every variant satisfies `A x0 = B z0 + c`.
    pub fn initial_state(&self) -> AdmmState {
        match self {
            Self::WireMesh(p) => p.initial_state(),
            Self::LpBox { problem, seed, .. } => problem.initial_state(*seed),
            _ => AdmmState::zeros(self.problem()),
        }
    }

    /// Default normalization scale `a`.
    pub fn default_scale(&self) -> f64 {
        match self {
            Self::WireMesh(p) => p.spec().edge_length,
            _ => 1.0,
        }
    }

    pub fn schedule(&self) -> Option<BetaSchedule> {
        match self {
            Self::LpBox { problem, .. } => Some(problem.schedule()),
            _ => None,
        }
    }

    /// Problem-specific quality measures of a finished solve.
    pub fn extras(&self, out: &SolveOutput) -> Vec<(&'static str, String)> {
        match self {
            Self::WireMesh(p) => {
                let worst = edge_length_error(&out.x, p.spec())
                    .into_iter()
                    .fold(0.0, f64::max);
                vec![("max_edge_error", format!("{worst:?}"))]
            }
            Self::LpBox { truth, .. } => {
                let labels = LpBoxProblem::threshold(&out.x);
                let mut v = vec![(
                    "foreground_pixels",
                    labels.iter().filter(|&&b| b).count().to_string(),
                )];
                if let Some(truth) = truth {
                    let hits = labels.iter().zip(truth).filter(|(a, b)| a == b).count();
                    v.push((
                        "segmentation_accuracy",
                        format!("{:?}", hits as f64 / truth.len() as f64),
                    ));
                }
                v
            }
            _ => Vec::new(),
        }
    }
}
