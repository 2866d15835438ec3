//! Solver strategies behind a common trait, looked up by name.

use std::collections::BTreeMap;

use super::config::SolverConfig;
use super::merit::MeritKind;
use super::problem::Problem;
use super::state::AdmmState;
use super::{aa_admm_solve, aadr_solve, admm_solve, SolveFailure, SolveOutput};

pub trait Solver: Send + Sync {
    fn name(&self) -> &str;

    /// Whether the solver guards candidates with a merit test.
    fn is_safeguarded(&self) -> bool;

    fn solve(
        &self,
        problem: &mut dyn Problem,
        init: &AdmmState,
    ) -> Result<SolveOutput, SolveFailure>;
}

pub struct Admm {
    pub config: SolverConfig,
}

impl Solver for Admm {
    fn name(&self) -> &str {
        "admm"
    }

    fn is_safeguarded(&self) -> bool {
        false
    }

    fn solve(
        &self,
        problem: &mut dyn Problem,
        init: &AdmmState,
    ) -> Result<SolveOutput, SolveFailure> {
        admm_solve(problem, &self.config, init)
    }
}

pub struct AaAdmm {
    pub config: SolverConfig,
}

impl Solver for AaAdmm {
    fn name(&self) -> &str {
        "aa-admm"
    }

    fn is_safeguarded(&self) -> bool {
        true
    }

    fn solve(
        &self,
        problem: &mut dyn Problem,
        init: &AdmmState,
    ) -> Result<SolveOutput, SolveFailure> {
        aa_admm_solve(problem, &self.config, init)
    }
}

/// Accelerated DR splitting; the merit kind lives in the config.
pub struct Aadr {
    name: String,
    pub config: SolverConfig,
}

impl Aadr {
    pub fn new(config: SolverConfig) -> Self {
        let name = match config.merit {
            MeritKind::PrimalResidualNorm => "aadr-drp",
            MeritKind::DrEnvelope => "aadr-dre",
        };
        Self {
            name: name.to_string(),
            config,
        }
    }
}

impl Solver for Aadr {
    fn name(&self) -> &str {
        &self.name
    }

    fn is_safeguarded(&self) -> bool {
        true
    }

    fn solve(
        &self,
        problem: &mut dyn Problem,
        init: &AdmmState,
    ) -> Result<SolveOutput, SolveFailure> {
        aadr_solve(problem, &self.config, init)
    }
}

type Factory = Box<dyn Fn(&SolverConfig) -> Box<dyn Solver> + Send + Sync>;

/// Name-keyed solver factories.
pub struct SolverRegistry {
    factories: BTreeMap<String, Factory>,
}

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    /// Registry with `admm`, `aa-admm`, `aadr-drp` and `aadr-dre`.
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.register("admm", |c| Box::new(Admm { config: c.clone() }));
        reg.register("aa-admm", |c| Box::new(AaAdmm { config: c.clone() }));
        reg.register("aadr-drp", |c| {
            Box::new(Aadr::new(SolverConfig {
                merit: MeritKind::PrimalResidualNorm,
                ..c.clone()
            }))
        });
        reg.register("aadr-dre", |c| {
            Box::new(Aadr::new(SolverConfig {
                merit: MeritKind::DrEnvelope,
                ..c.clone()
            }))
        });
        reg
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&SolverConfig) -> Box<dyn Solver> + Send + Sync + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.factories.keys().map(String::as_str).collect()
    }

    /// Instantiates the solver registered under `name` with `config`.
    pub fn build(&self, name: &str, config: &SolverConfig) -> Option<Box<dyn Solver>> {
        self.factories.get(name).map(|f| f(config))
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_registered() {
        let reg = SolverRegistry::with_builtins();
        assert_eq!(reg.names(), vec!["aa-admm", "aadr-dre", "aadr-drp", "admm"]);
        let cfg = SolverConfig::default();
        for name in reg.names() {
            assert_eq!(reg.build(name, &cfg).unwrap().name(), name);
        }
        assert!(reg.build("newton", &cfg).is_none());
        assert!(!reg.build("admm", &cfg).unwrap().is_safeguarded());
    }
}
