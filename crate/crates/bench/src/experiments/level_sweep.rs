use ffia::{FfiaPlan, TruncationParams};
use num_complex::Complex64;

use super::{Check, Context, Experiment, Report};
use crate::config::{LevelSpec, Mode};
use crate::error::Result;
use crate::sample;
use crate::table::{real, Table};
use crate::timing::{measure, Timing, REPETITIONS};

/// Wall time of plan plus apply against tree depth.
pub struct LevelSweep;

const HEADER: &[&str] = &["N", "eps", "l_max", "cpu_seconds", "eps_a"];

/// Levels swept under `auto`: three either side of `log2 N - 5`, clipped to
/// `2..=log2 N` but never fewer than four. Shallower trees are close to
/// quadratic at large N and only slow the sweep down.
pub fn auto_levels(n: usize) -> Vec<usize> {
    let log2n = n.trailing_zeros() as i64;
    let rule = log2n - 5;
    let lo = (rule - 3).max(2);
    let hi = (rule + 3).min(log2n).max(lo + 3);
    (lo as usize..=hi as usize).collect()
}

impl Experiment for LevelSweep {
    fn mode(&self) -> Mode {
        Mode::LevelSweep
    }

    fn header(&self) -> &'static [&'static str] {
        HEADER
    }

    fn run(&self, ctx: &mut Context, assert: bool) -> Result<Report> {
        let cfg = ctx.config.clone();
        let mut table = Table::new(HEADER);
        let mut checks = Vec::new();
        for &n in &cfg.sizes {
            let y = sample::targets(n, cfg.distribution, cfg.seed);
            let ones = vec![Complex64::new(1.0, 0.0); n];
            let levels = match &cfg.levels {
                LevelSpec::List(levels) => levels.clone(),
                LevelSpec::Auto => auto_levels(n),
            };
            for &eps in &cfg.eps {
                let mut timings = Vec::with_capacity(levels.len());
                for &l_max in &levels {
                    let params = TruncationParams::for_level(eps, l_max)?;
                    let run = || -> Result<Vec<Complex64>> {
                        Ok(FfiaPlan::forward(n, &y, params)?.forward_apply(&ones)?)
                    };
                    let (timing, g) = if cfg.timing {
                        let (t, g) = measure(REPETITIONS, run);
                        (t, g?)
                    } else {
                        (Timing::ZERO, run()?)
                    };
                    let eps_a = g.iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max);
                    table.push(vec![
                        n.to_string(),
                        real(eps),
                        l_max.to_string(),
                        real(timing.median),
                        real(eps_a),
                    ]);
                    if cfg.timing {
                        table.notes.push(format!(
                            "timing N={n} eps={eps:e} l_max={l_max} min={:e} max={:e}",
                            timing.min, timing.max
                        ));
                    }
                    timings.push((l_max, timing.median));
                }
                if !cfg.timing {
                    continue;
                }
                let &(best, best_time) = timings
                    .iter()
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("at least one level");
                table.notes.push(format!(
                    "argmin N={n} eps={eps:e} l_max={best} cpu_seconds={best_time:e}"
                ));
                if assert {
                    let label = format!("N={n} eps={eps:e}");
                    checks.push(Check::new(
                        format!("at least 4 levels swept {label}"),
                        levels.len() >= 4,
                        format!("{} levels", levels.len()),
                    ));
                    checks.push(Check::new(
                        format!("argmin is minimal {label}"),
                        timings.iter().all(|&(_, t)| best_time <= t),
                        format!("l_max={best}"),
                    ));
                    if n >= 1 << 12 {
                        let rule = n.trailing_zeros() as i64 - 5;
                        checks.push(Check::new(
                            format!("argmin within 1 of log2 N - 5 {label}"),
                            (best as i64 - rule).abs() <= 1,
                            format!("argmin={best} rule={rule}"),
                        ));
                    }
                }
            }
        }
        Ok(Report { table, checks })
    }
}
