use super::{Check, Context, Experiment, Report};
use crate::config::Mode;
use crate::error::Result;
use crate::table::{real, Table};
use crate::threshold::{measure, Samples, MAX_DIRECT_N};

/// The machine-precision profile `eps_th(N)`; sizes above the dense-oracle
/// limit are extrapolated and flagged.
pub struct Threshold;

const HEADER: &[&str] = &["N", "eps_th", "extrapolated"];

impl Experiment for Threshold {
    fn mode(&self) -> Mode {
        Mode::Threshold
    }

    fn header(&self) -> &'static [&'static str] {
        HEADER
    }

    fn run(&self, ctx: &mut Context, assert: bool) -> Result<Report> {
        let profile = ctx.threshold()?.clone();
        let mut table = Table::new(HEADER);
        if let Some((a, b)) = profile.fit {
            table.notes.push(format!("fit eps_th = {a:e} * N^{b:e}"));
        }
        for e in &profile.entries {
            table.push(vec![
                e.n.to_string(),
                real(e.eps_th),
                e.extrapolated.to_string(),
            ]);
        }
        let mut checks = Vec::new();
        if assert {
            let cfg = &ctx.config;
            for e in profile.entries.iter().filter(|e| !e.extrapolated) {
                checks.push(Check::new(
                    format!("eps_th >= 1e-16 N={}", e.n),
                    e.eps_th >= 1e-16,
                    real(e.eps_th),
                ));
                if e.n <= MAX_DIRECT_N {
                    let constant = measure(
                        e.n,
                        cfg.seed,
                        cfg.distribution,
                        Samples::Constant,
                        ctx.policy.as_ref(),
                    )?;
                    let ratio = (e.eps_th / constant).max(constant / e.eps_th);
                    checks.push(Check::new(
                        format!("constant and random f thresholds within 10x N={}", e.n),
                        ratio <= 10.0,
                        format!("random={:e} constant={constant:e}", e.eps_th),
                    ));
                }
            }
        }
        Ok(Report { table, checks })
    }
}
