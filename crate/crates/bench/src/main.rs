use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use ffia_bench::config::{parse_eps_list, parse_sizes};
use ffia_bench::{execute, BenchError, ExperimentConfig, LevelSpec, Mode, TargetDistribution};

/// Runs one FFIA experiment and writes its results as CSV.
#[derive(Debug, Parser)]
#[command(name = "ffia-bench", version = env!("FFIA_BENCH_BUILD_ID"))]
struct Cli {
    /// error-sweep, level-sweep, timing, truncation-trace or threshold
    #[arg(long)]
    mode: String,
    /// Sizes N = M, comma separated; `2^k` is accepted
    #[arg(long, default_value = "2^10")]
    n: String,
    /// Prescribed tolerances, comma separated
    #[arg(long, default_value = "1e-6")]
    eps: String,
    /// Tree depths, comma separated, or `auto`
    #[arg(long, default_value = "auto")]
    lmax: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// `uniform` or `perturbed:<fraction>`
    #[arg(long, default_value = "uniform")]
    dist: String,
    #[arg(long)]
    out: PathBuf,
    /// Write zeros in timing columns and skip the timed repetitions
    #[arg(long)]
    no_timing: bool,
    /// Worker threads; timing runs default to 1
    #[arg(long)]
    threads: Option<usize>,
    /// Level policy used for `--lmax auto`: empirical, fixed:<l> or cost-model
    #[arg(long, default_value = "empirical")]
    policy: String,
    /// Evaluate the mode's checks and exit 3 if any fails
    #[arg(long)]
    assert: bool,
}

impl Cli {
    fn config(&self) -> Result<ExperimentConfig, BenchError> {
        let mode: Mode = self.mode.parse()?;
        let mut cfg = ExperimentConfig::new(
            mode,
            parse_sizes(&self.n)?,
            parse_eps_list(&self.eps)?,
            self.out.clone(),
        );
        cfg.levels = self.lmax.parse::<LevelSpec>()?;
        cfg.seed = self.seed;
        cfg.distribution = self.dist.parse::<TargetDistribution>()?;
        cfg.timing = !self.no_timing;
        cfg.threads = self.threads;
        cfg.policy = self.policy.clone();
        Ok(cfg)
    }
}

fn run(cli: &Cli) -> Result<(), BenchError> {
    let report = execute(cli.config()?, cli.assert)?;
    for check in &report.checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", check.name, check.detail);
    }
    if cli.assert {
        report.verdict()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ffia-bench: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
