//! Flat JSON configuration, with CLI overrides applied on top.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::BenchError;

pub const PROBLEMS: [&str; 4] = ["quadratic", "logistic", "wire-mesh", "lp-box"];

/// Every field is optional in the file; unset fields take the defaults below.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub problem: String,
    pub solvers: Vec<String>,
    pub seed: u64,
    pub out: PathBuf,
    pub parallel: bool,

    pub epsilon: f64,
    pub k_max: usize,
    pub m: usize,
    pub nu1: f64,
    pub nu2: f64,
    pub anderson_regularization: f64,
    /// Normalization scale `a`; the problem default when unset.
    pub scale: Option<f64>,
    /// Penalty override; the problem default when unset.
    pub beta: Option<f64>,

    // quadratic
    pub target_a: f64,
    pub target_b: f64,
    pub curvature_f: f64,
    pub curvature_g: f64,

    // logistic
    pub features: usize,
    pub samples: usize,
    pub lambda: f64,

    // wire mesh
    pub mesh_rows: usize,
    pub mesh_cols: usize,
    pub mesh_span: f64,
    pub mesh_smoothness: f64,

    // lp-box
    pub image: Option<PathBuf>,
    pub image_size: usize,
    pub image_noise: f64,
    pub smoothness: f64,
    pub sigma: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            problem: "quadratic".into(),
            solvers: Vec::new(),
            seed: 0,
            out: PathBuf::from("bench-out"),
            parallel: true,
            epsilon: 1e-9,
            k_max: 2000,
            m: 6,
            nu1: 1e-3,
            nu2: 1e-3,
            anderson_regularization: 0.0,
            scale: None,
            beta: None,
            target_a: 1.0,
            target_b: 3.0,
            curvature_f: 1.0,
            curvature_g: 1.0,
            features: 100,
            samples: 100,
            lambda: 1e-4,
            mesh_rows: 20,
            mesh_cols: 20,
            mesh_span: 1.0,
            mesh_smoothness: 0.0,
            image: None,
            image_size: 32,
            image_noise: 0.1,
            smoothness: 2.0,
            sigma: 0.1,
        }
    }
}

/// Command-line overrides; `None` leaves the file value alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub problem: Option<String>,
    pub solvers: Vec<String>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub k_max: Option<usize>,
    pub m: Option<usize>,
    pub image: Option<PathBuf>,
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(p) = o.problem {
            self.problem = p;
        }
        if !o.solvers.is_empty() {
            self.solvers = o.solvers;
        }
        if let Some(v) = o.out {
            self.out = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = o.k_max {
            self.k_max = v;
        }
        if let Some(v) = o.m {
            self.m = v;
        }
        if let Some(v) = o.image {
            self.image = Some(v);
        }
    }

    pub fn validate(&self, known_solvers: &[&str]) -> Result<(), BenchError> {
        let usage = |m: String| Err(BenchError::Usage(m));
        if self.solvers.is_empty() {
            return usage("at least one solver is required".into());
        }
        for s in &self.solvers {
            if !known_solvers.contains(&s.as_str()) {
                return usage(format!(
                    "unknown solver {s:?}; known: {}",
                    known_solvers.join(", ")
                ));
            }
        }
        let mut seen = self.solvers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.solvers.len() {
            return usage("solver listed twice".into());
        }
        if !PROBLEMS.contains(&self.problem.as_str()) {
            return usage(format!(
                "unknown problem {:?}; known: {}",
                self.problem,
                PROBLEMS.join(", ")
            ));
        }
        if !(self.epsilon > 0.0) {
            return usage("eps must be positive".into());
        }
        if self.k_max == 0 {
            return usage("kmax must be positive".into());
        }
        if let Some(a) = self.scale {
            if !(a > 0.0) {
                return usage("scale must be positive".into());
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_json_gives_defaults() {
        assert_eq!(
            BenchConfig::from_json("{}").unwrap(),
            BenchConfig::default()
        );
    }

    #[test]
    fn unknown_field_is_usage_error() {
        assert!(matches!(
            BenchConfig::from_json(r#"{"kmax": 3}"#),
            Err(BenchError::Usage(_))
        ));
    }

    #[test]
    fn overrides_win() {
        let mut c =
            BenchConfig::from_json(r#"{"problem": "logistic", "seed": 4, "solvers": ["admm"]}"#)
                .unwrap();
        c.apply(Overrides {
            seed: Some(9),
            solvers: vec!["aadr-drp".into()],
            ..Overrides::default()
        });
        assert_eq!((c.problem.as_str(), c.seed), ("logistic", 9));
        assert_eq!(c.solvers, vec!["aadr-drp"]);
    }

    #[test]
    fn validation() {
        let known = ["admm", "aadr-drp"];
        let mut c = BenchConfig::default();
        assert!(c.validate(&known).is_err());
        c.solvers = vec!["admm".into()];
        assert!(c.validate(&known).is_ok());
        c.solvers = vec!["admm".into(), "admm".into()];
        assert!(c.validate(&known).is_err());
        c.solvers = vec!["newton".into()];
        assert!(c.validate(&known).is_err());
        c.solvers = vec!["admm".into()];
        c.epsilon = 0.0;
        assert!(c.validate(&known).is_err());
        c.epsilon = 1e-9;
        c.problem = "knapsack".into();
        assert!(c.validate(&known).is_err());
    }
}
