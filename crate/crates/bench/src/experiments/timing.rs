use ffia::oracle::direct_forward;
use ffia::{dft_inverse, FfiaPlan, Spectrum, TruncationParams};

use super::{Check, Context, Experiment, Report};
use crate::config::Mode;
use crate::error::Result;
use crate::sample;
use crate::table::{real, Table};
use crate::threshold::MAX_DIRECT_N;
use crate::timing::{log_log_slope, measure, Timing, REPETITIONS};

/// CPU time of the dense method, the fast method at fixed and at machine
/// precision, the plan build, and a bare FFT, against N.
pub struct TimingComparison;

const HEADER: &[&str] = &["N", "method", "cpu_seconds"];

pub const DIRECT: &str = "direct";
pub const FIXED: &str = "ffia-fixed-eps";
pub const MACHINE: &str = "ffia-machine-eps";
pub const SETUP: &str = "datastructure-setup";
pub const FFT: &str = "fft-only";

/// Per-size medians of one timing run.
#[derive(Debug, Clone, Default)]
pub struct Medians {
    pub n: usize,
    pub direct: Option<f64>,
    pub fixed: f64,
    pub machine: f64,
    pub setup: f64,
    pub fft: f64,
}

/// Measures one size. With timing disabled nothing is run and every entry is
/// zero.
pub fn time_size(ctx: &mut Context, n: usize, table: &mut Table) -> Result<Medians> {
    let cfg = ctx.config.clone();
    let mut medians = Medians {
        n,
        ..Medians::default()
    };
    let record = |table: &mut Table, method: &str, t: Timing| {
        table.push(vec![n.to_string(), method.to_string(), real(t.median)]);
        if cfg.timing {
            table.notes.push(format!(
                "timing N={n} method={method} min={:e} max={:e}",
                t.min, t.max
            ));
        }
        t.median
    };
    if !cfg.timing {
        if n <= MAX_DIRECT_N {
            record(table, DIRECT, Timing::ZERO);
        }
        for method in [FIXED, MACHINE, SETUP, FFT] {
            record(table, method, Timing::ZERO);
        }
        return Ok(medians);
    }

    let y = sample::targets(n, cfg.distribution, cfg.seed);
    let f = sample::unit_weights(n, cfg.seed);
    if n <= MAX_DIRECT_N {
        let (t, g) = measure(REPETITIONS, || direct_forward(&f, &y));
        g?;
        medians.direct = Some(record(table, DIRECT, t));
    }

    let eps = cfg.eps[0];
    let params = TruncationParams::plan(eps, n, n, ctx.policy.as_ref())?;
    let (t_setup, plan) = measure(REPETITIONS, || FfiaPlan::forward(n, &y, params));
    let plan = plan?;
    let (t_fixed, g) = measure(REPETITIONS, || plan.forward_apply(&f));
    g?;
    medians.fixed = record(table, FIXED, t_fixed);

    let machine_eps = ctx
        .threshold()?
        .plan_eps(n)
        .expect("threshold measured for every configured size");
    let params = TruncationParams::plan(machine_eps, n, n, ctx.policy.as_ref())?;
    table.notes.push(format!(
        "machine-eps N={n} eps={machine_eps:e} q={} p={} l_max={}",
        params.q(),
        params.p(),
        params.l_max()
    ));
    let machine_plan = FfiaPlan::forward(n, &y, params)?;
    let (t_machine, g) = measure(REPETITIONS, || machine_plan.forward_apply(&f));
    g?;
    medians.machine = record(table, MACHINE, t_machine);
    medians.setup = record(table, SETUP, t_setup);

    let spectrum = Spectrum::new(f.clone())?;
    let (t_fft, _) = measure(REPETITIONS, || dft_inverse(&spectrum));
    medians.fft = record(table, FFT, t_fft);
    Ok(medians)
}

impl Experiment for TimingComparison {
    fn mode(&self) -> Mode {
        Mode::Timing
    }

    fn header(&self) -> &'static [&'static str] {
        HEADER
    }

    fn run(&self, ctx: &mut Context, assert: bool) -> Result<Report> {
        let mut table = Table::new(HEADER);
        table.notes.push(format!(
            "fixed eps={:e} threads={}",
            ctx.config.eps[0],
            rayon::current_num_threads()
        ));
        let mut all = Vec::new();
        for &n in &ctx.config.sizes.clone() {
            all.push(time_size(ctx, n, &mut table)?);
        }
        let mut checks = Vec::new();
        if assert && ctx.config.timing {
            for m in all.iter().filter(|m| m.n >= 1 << 10) {
                if let Some(direct) = m.direct {
                    checks.push(Check::new(
                        format!("ffia faster than direct N={}", m.n),
                        2.0 * m.fixed <= direct,
                        format!("ffia={:e} direct={direct:e}", m.fixed),
                    ));
                }
                checks.push(Check::new(
                    format!("setup cheaper than evaluation N={}", m.n),
                    m.setup < m.fixed,
                    format!("setup={:e} evaluation={:e}", m.setup, m.fixed),
                ));
            }
            let points: Vec<(f64, f64)> = all
                .iter()
                .filter(|m| (1 << 12..=1 << 16).contains(&m.n))
                .map(|m| (m.n as f64, m.machine))
                .collect();
            if points.len() >= 2 {
                let slope = log_log_slope(&points);
                checks.push(Check::new(
                    "machine-eps log-log slope <= 1.2",
                    slope <= 1.2,
                    format!("slope={slope:.3}"),
                ));
            }
        }
        Ok(Report { table, checks })
    }
}
