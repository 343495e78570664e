//! Experiment configuration and the parsers for its command-line forms.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use ffia::special::min_plannable_eps;

use crate::error::{BenchError, Result};

pub const MIN_LOG2_N: u32 = 3;
pub const MAX_LOG2_N: u32 = 20;
pub const DEFAULT_PERTURBATION: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    ErrorSweep,
    LevelSweep,
    Timing,
    TruncationTrace,
    Threshold,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::ErrorSweep,
        Mode::LevelSweep,
        Mode::Timing,
        Mode::TruncationTrace,
        Mode::Threshold,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::ErrorSweep => "error-sweep",
            Mode::LevelSweep => "level-sweep",
            Mode::Timing => "timing",
            Mode::TruncationTrace => "truncation-trace",
            Mode::Threshold => "threshold",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| BenchError::Config(format!("unknown mode '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetDistribution {
    Uniform,
    /// Grid nodes moved by `u * fraction * 2pi/N`, `u` uniform in `[-1, 1]`.
    Perturbed(f64),
}

impl fmt::Display for TargetDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetDistribution::Uniform => f.write_str("uniform"),
            TargetDistribution::Perturbed(frac) => write!(f, "perturbed:{frac}"),
        }
    }
}

impl FromStr for TargetDistribution {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "uniform" => Ok(TargetDistribution::Uniform),
            None if s == "perturbed" => Ok(TargetDistribution::Perturbed(DEFAULT_PERTURBATION)),
            Some(("perturbed", frac)) => {
                let frac: f64 = frac
                    .parse()
                    .map_err(|_| BenchError::Config(format!("bad perturbation '{frac}'")))?;
                if !(0.0..0.5).contains(&frac) {
                    return Err(BenchError::Config(format!(
                        "perturbation {frac} outside [0, 0.5)"
                    )));
                }
                Ok(TargetDistribution::Perturbed(frac))
            }
            _ => Err(BenchError::Config(format!(
                "unknown distribution '{s}' (uniform or perturbed:<fraction>)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelSpec {
    /// Chosen by the level policy (or swept, in level-sweep mode).
    Auto,
    List(Vec<usize>),
}

impl fmt::Display for LevelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelSpec::Auto => f.write_str("auto"),
            LevelSpec::List(levels) => f.write_str(&join(levels)),
        }
    }
}

impl FromStr for LevelSpec {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(LevelSpec::Auto);
        }
        let levels = split_list(s)
            .map(|item| {
                item.parse::<usize>()
                    .map_err(|_| BenchError::Config(format!("bad level '{item}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(l) = levels.iter().find(|l| !(2..=30).contains(*l)) {
            return Err(BenchError::Config(format!("level {l} outside 2..=30")));
        }
        Ok(LevelSpec::List(levels))
    }
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|item| !item.is_empty())
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// Comma-separated sizes; each either a plain integer or `2^k`.
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let sizes = split_list(s)
        .map(|item| {
            let n = match item.strip_prefix("2^") {
                Some(k) => k.parse::<u32>().ok().and_then(|k| 1usize.checked_shl(k)),
                None => item.parse::<usize>().ok(),
            };
            n.ok_or_else(|| BenchError::Config(format!("bad size '{item}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if sizes.is_empty() {
        return Err(BenchError::Config("empty size list".into()));
    }
    Ok(sizes)
}

pub fn parse_eps_list(s: &str) -> Result<Vec<f64>> {
    let eps = split_list(s)
        .map(|item| {
            item.parse::<f64>()
                .map_err(|_| BenchError::Config(format!("bad eps '{item}'")))
        })
        .collect::<Result<Vec<_>>>()?;
    if eps.is_empty() {
        return Err(BenchError::Config("empty eps list".into()));
    }
    Ok(eps)
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub sizes: Vec<usize>,
    pub eps: Vec<f64>,
    pub levels: LevelSpec,
    pub seed: u64,
    pub distribution: TargetDistribution,
    pub out: PathBuf,
    /// When false every timing column is written as zero.
    pub timing: bool,
    pub threads: Option<usize>,
    /// Level policy for `auto`, as a registry spec.
    pub policy: String,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, sizes: Vec<usize>, eps: Vec<f64>, out: impl Into<PathBuf>) -> Self {
        Self {
            mode,
            sizes,
            eps,
            levels: LevelSpec::Auto,
            seed: 42,
            distribution: TargetDistribution::Uniform,
            out: out.into(),
            timing: true,
            threads: None,
            policy: "empirical".into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(BenchError::Config("no sizes given".into()));
        }
        for &n in &self.sizes {
            let ok = n.is_power_of_two() && (MIN_LOG2_N..=MAX_LOG2_N).contains(&n.trailing_zeros());
            if !ok {
                return Err(BenchError::Config(format!(
                    "N = {n} is not a power of two in [2^{MIN_LOG2_N}, 2^{MAX_LOG2_N}]"
                )));
            }
        }
        if self.eps.is_empty() {
            return Err(BenchError::Config("no eps given".into()));
        }
        let floor = min_plannable_eps();
        for &eps in &self.eps {
            if !(eps >= floor && eps < 1.0) {
                return Err(BenchError::Config(format!(
                    "eps {eps:e} outside [{floor:e}, 1)"
                )));
            }
        }
        if let LevelSpec::List(levels) = &self.levels {
            if levels.is_empty() {
                return Err(BenchError::Config("empty level list".into()));
            }
        }
        if self.threads == Some(0) {
            return Err(BenchError::Config("--threads must be positive".into()));
        }
        ffia::PolicyRegistry::default()
            .resolve(&self.policy)
            .map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(())
    }

    /// Metadata echoed into the CSV comment block.
    pub fn echo(&self) -> String {
        format!(
            "mode={} n={} eps={} lmax={} seed={} dist={} policy={} timing={}",
            self.mode,
            join(&self.sizes),
            self.eps
                .iter()
                .map(|e| format!("{e:e}"))
                .collect::<Vec<_>>()
                .join(","),
            self.levels,
            self.seed,
            self.distribution,
            self.policy,
            if self.timing { "on" } else { "off" },
        )
    }
}
