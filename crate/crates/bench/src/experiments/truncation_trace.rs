use ffia::TruncationParams;

use super::{Check, Context, Experiment, Report};
use crate::config::Mode;
use crate::error::Result;
use crate::table::Table;
use crate::threshold::PROBE_EPS;

/// Truncation numbers chosen at a fixed tolerance and at the measured
/// machine threshold, against N.
pub struct TruncationTrace;

const HEADER: &[&str] = &["N", "mode", "q", "p"];

impl Experiment for TruncationTrace {
    fn mode(&self) -> Mode {
        Mode::TruncationTrace
    }

    fn header(&self) -> &'static [&'static str] {
        HEADER
    }

    fn run(&self, ctx: &mut Context, assert: bool) -> Result<Report> {
        let cfg = ctx.config.clone();
        let eps = cfg.eps[0];
        let mut table = Table::new(HEADER);
        table.notes.push(format!("fixed-eps eps={eps:e}"));
        let mut fixed = Vec::new();
        let mut machine = Vec::new();
        for &n in &cfg.sizes {
            let l_max = ctx.levels_for(n, eps)?[0];
            let params = TruncationParams::for_level(eps, l_max)?;
            table.push(vec![
                n.to_string(),
                "fixed-eps".into(),
                params.q().to_string(),
                params.p().to_string(),
            ]);
            fixed.push((n, params.q(), params.p()));
        }
        for &n in &cfg.sizes {
            let eps_th = ctx
                .threshold()?
                .plan_eps(n)
                .expect("threshold measured for every configured size");
            let params = TruncationParams::plan(eps_th, n, n, ctx.policy.as_ref())?;
            let ceiling = TruncationParams::plan(PROBE_EPS, n, n, ctx.policy.as_ref())?;
            table.notes.push(format!(
                "threshold N={n} eps={eps_th:e} l_max={}",
                params.l_max()
            ));
            table.push(vec![
                n.to_string(),
                "threshold".into(),
                params.q().to_string(),
                params.p().to_string(),
            ]);
            machine.push((n, params.q(), params.p(), ceiling.q(), ceiling.p()));
        }

        let mut checks = Vec::new();
        if assert {
            let q0 = fixed[0].1;
            checks.push(Check::new(
                "fixed-eps q constant in N",
                fixed.iter().all(|&(_, q, _)| q == q0),
                format!("q={q0}"),
            ));
            for pair in fixed.windows(2) {
                let ((n1, _, p1), (n2, _, p2)) = (pair[0], pair[1]);
                if n2 == 2 * n1 && matches!(cfg.levels, crate::config::LevelSpec::Auto) {
                    checks.push(Check::new(
                        format!("p(2N) - p(N) in {{0, 1}} N={n1}"),
                        p2 == p1 || p2 == p1 + 1,
                        format!("p={p1} -> {p2}"),
                    ));
                }
            }
            for &(n, q, p, q_cap, p_cap) in &machine {
                checks.push(Check::new(
                    format!("threshold q, p bounded by eps=1e-12 values N={n}"),
                    q <= q_cap && p <= p_cap,
                    format!("q={q} p={p} cap=({q_cap}, {p_cap})"),
                ));
            }
        }
        Ok(Report { table, checks })
    }
}
