//! Experiment drivers for the `ffia` crate: accuracy sweeps, tree-depth
//! optimisation, timing comparisons against the dense method, truncation
//! traces and machine-precision thresholds. Each run writes one CSV.

pub mod config;
pub mod error;
pub mod experiments;
pub mod sample;
pub mod table;
pub mod threshold;
pub mod timing;

pub use config::{ExperimentConfig, LevelSpec, Mode, TargetDistribution};
pub use error::{BenchError, Result};
pub use experiments::{execute, Check, Experiment, ExperimentRegistry, Report};
pub use threshold::{estimate_machine_threshold, MachinePrecisionProfile};
