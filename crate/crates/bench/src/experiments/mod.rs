//! Experiment drivers, registered by mode name and picked at runtime.

mod error_sweep;
mod level_sweep;
mod threshold;
mod timing;
mod truncation_trace;

use std::collections::BTreeMap;
use std::sync::Arc;

use ffia::{LevelPolicy, PolicyRegistry};

use crate::config::{ExperimentConfig, Mode};
use crate::error::{BenchError, Result};
use crate::table::Table;
use crate::threshold::{estimate_machine_threshold, MachinePrecisionProfile};

pub use error_sweep::ErrorSweep;
pub use level_sweep::LevelSweep;
pub use threshold::Threshold;
pub use timing::TimingComparison;
pub use truncation_trace::TruncationTrace;

/// One pass/fail line of `--assert`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: Table,
    pub checks: Vec<Check>,
}

impl Report {
    /// `Err(Assertion)` when any check failed.
    pub fn verdict(&self) -> Result<()> {
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        if failed == 0 {
            Ok(())
        } else {
            Err(BenchError::Assertion {
                failed,
                total: self.checks.len(),
            })
        }
    }
}

/// State shared by one run: the resolved level policy and a lazily measured
/// threshold profile.
pub struct Context {
    pub config: ExperimentConfig,
    pub policy: Arc<dyn LevelPolicy>,
    threshold: Option<MachinePrecisionProfile>,
}

impl Context {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let policy = PolicyRegistry::default()
            .resolve(&config.policy)
            .map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(Self {
            config,
            policy,
            threshold: None,
        })
    }

    pub fn threshold(&mut self) -> Result<&MachinePrecisionProfile> {
        if self.threshold.is_none() {
            let profile = estimate_machine_threshold(
                &self.config.sizes,
                self.config.seed,
                self.config.distribution,
                self.policy.as_ref(),
            )?;
            self.threshold = Some(profile);
        }
        Ok(self.threshold.as_ref().expect("just measured"))
    }

    /// Explicit levels, or the policy's choice for `n` at truncation `p`.
    pub fn levels_for(&self, n: usize, eps: f64) -> Result<Vec<usize>> {
        match &self.config.levels {
            crate::config::LevelSpec::List(levels) => Ok(levels.clone()),
            crate::config::LevelSpec::Auto => {
                let params = ffia::TruncationParams::plan(eps, n, n, self.policy.as_ref())?;
                Ok(vec![params.l_max()])
            }
        }
    }
}

pub trait Experiment: Send + Sync {
    fn mode(&self) -> Mode;
    fn header(&self) -> &'static [&'static str];
    /// Runs the experiment. Checks are evaluated only when `assert` is set.
    fn run(&self, ctx: &mut Context, assert: bool) -> Result<Report>;
}

pub struct ExperimentRegistry {
    experiments: BTreeMap<&'static str, Box<dyn Experiment>>,
}

impl ExperimentRegistry {
    pub fn empty() -> Self {
        Self {
            experiments: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, experiment: Box<dyn Experiment>) {
        self.experiments
            .insert(experiment.mode().name(), experiment);
    }

    pub fn get(&self, mode: Mode) -> Option<&dyn Experiment> {
        self.experiments.get(mode.name()).map(|e| e.as_ref())
    }

    pub fn modes(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.experiments.keys().copied()
    }
}

impl Default for ExperimentRegistry {
    fn default() -> Self {
        let mut registry = Self::empty();
        registry.register(Box::new(ErrorSweep));
        registry.register(Box::new(LevelSweep));
        registry.register(Box::new(TimingComparison));
        registry.register(Box::new(TruncationTrace));
        registry.register(Box::new(Threshold));
        registry
    }
}

/// Runs the configured experiment and writes its CSV. Failed checks are left
/// in the report for the caller to act on.
pub fn execute(config: ExperimentConfig, assert: bool) -> Result<Report> {
    let registry = ExperimentRegistry::default();
    let experiment = registry
        .get(config.mode)
        .ok_or_else(|| BenchError::Config(format!("no experiment for mode {}", config.mode)))?;
    let threads = config
        .threads
        .unwrap_or(if config.mode == Mode::Timing { 1 } else { 0 });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    let mut ctx = Context::new(config)?;
    let report = pool.install(|| experiment.run(&mut ctx, assert))?;
    report.table.write(&ctx.config.out, &ctx.config.echo())?;
    Ok(report)
}
