use ffia::{FfiaPlan, TruncationParams};
use num_complex::Complex64;

use super::{Check, Context, Experiment, Report};
use crate::config::Mode;
use crate::error::Result;
use crate::sample;
use crate::table::{real, Table};

/// Error of the fast apply on `f = 1`, whose interpolant is exactly 1.
pub struct ErrorSweep;

const HEADER: &[&str] = &["N", "eps", "l_max", "q", "p", "eps_a"];

impl Experiment for ErrorSweep {
    fn mode(&self) -> Mode {
        Mode::ErrorSweep
    }

    fn header(&self) -> &'static [&'static str] {
        HEADER
    }

    fn run(&self, ctx: &mut Context, assert: bool) -> Result<Report> {
        let mut table = Table::new(HEADER);
        let mut checks = Vec::new();
        let mut rows = Vec::new();
        for &n in &ctx.config.sizes.clone() {
            let y = sample::targets(n, ctx.config.distribution, ctx.config.seed);
            let ones = vec![Complex64::new(1.0, 0.0); n];
            for &eps in &ctx.config.eps.clone() {
                for l_max in ctx.levels_for(n, eps)? {
                    let params = TruncationParams::for_level(eps, l_max)?;
                    let (q, p) = (params.q(), params.p());
                    let g = FfiaPlan::forward(n, &y, params)?.forward_apply(&ones)?;
                    let eps_a = g.iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max);
                    table.push(vec![
                        n.to_string(),
                        real(eps),
                        l_max.to_string(),
                        q.to_string(),
                        p.to_string(),
                        real(eps_a),
                    ]);
                    rows.push((n, eps, l_max, eps_a));
                }
            }
        }
        if assert {
            let profile = ctx.threshold()?.clone();
            for (n, eps, l_max, eps_a) in rows {
                let label = format!("N={n} eps={eps:e} l_max={l_max}");
                checks.push(Check::new(
                    format!("finite error {label}"),
                    eps_a.is_finite() && eps_a >= 0.0,
                    real(eps_a),
                ));
                let eps_th = profile.get(n).map_or(0.0, |e| e.eps_th);
                if eps >= eps_th {
                    checks.push(Check::new(
                        format!("eps_a <= eps {label}"),
                        eps_a <= eps,
                        format!("eps_a={eps_a:e} eps_th={eps_th:e}"),
                    ));
                }
            }
        }
        Ok(Report { table, checks })
    }
}
