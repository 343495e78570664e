//! Machine-precision threshold `eps_th(N)`: the error floor of the fast
//! method, measured against the dense oracle at the tightest tolerance.

use ffia::oracle::direct_forward;
use ffia::{FfiaPlan, LevelPolicy, TruncationParams};
use num_complex::Complex64;

use crate::config::TargetDistribution;
use crate::error::Result;
use crate::sample;

/// Prescribed tolerance of the threshold runs.
pub const PROBE_EPS: f64 = 1e-12;

/// Largest size measured against the dense oracle.
pub const MAX_DIRECT_N: usize = 1 << 13;

const ANCHORS: [usize; 3] = [1 << 11, 1 << 12, 1 << 13];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdEntry {
    pub n: usize,
    pub eps_th: f64,
    pub extrapolated: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MachinePrecisionProfile {
    pub entries: Vec<ThresholdEntry>,
    /// `eps_th = a N^b` over the measured sizes, when a fit was needed.
    pub fit: Option<(f64, f64)>,
}

impl MachinePrecisionProfile {
    pub fn get(&self, n: usize) -> Option<&ThresholdEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    /// The tolerance machine-precision runs are planned at. Below the probe
    /// tolerance the measurement carries no information, so it is a floor.
    pub fn plan_eps(&self, n: usize) -> Option<f64> {
        self.get(n).map(|e| e.eps_th.max(PROBE_EPS))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Samples {
    /// Random `f` in `[0, 1)`.
    Random,
    /// `f = 1`.
    Constant,
}

/// Max deviation of the fast forward apply at `PROBE_EPS` from the dense
/// oracle, for `N = M = n`.
pub fn measure(
    n: usize,
    seed: u64,
    distribution: TargetDistribution,
    samples: Samples,
    policy: &dyn LevelPolicy,
) -> Result<f64> {
    let y = sample::targets(n, distribution, seed);
    let f = match samples {
        Samples::Random => sample::unit_weights(n, seed),
        Samples::Constant => vec![Complex64::new(1.0, 0.0); n],
    };
    let params = TruncationParams::plan(PROBE_EPS, n, n, policy)?;
    let fast = FfiaPlan::forward(n, &y, params)?.forward_apply(&f)?;
    let exact = direct_forward(&f, &y)?;
    let err = fast
        .iter()
        .zip(&exact)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(err.max(f64::MIN_POSITIVE))
}

pub fn estimate_machine_threshold(
    sizes: &[usize],
    seed: u64,
    distribution: TargetDistribution,
    policy: &dyn LevelPolicy,
) -> Result<MachinePrecisionProfile> {
    let mut measured: Vec<(usize, f64)> = Vec::new();
    let measure_once = |n: usize, measured: &mut Vec<(usize, f64)>| -> Result<f64> {
        if let Some(&(_, e)) = measured.iter().find(|(m, _)| *m == n) {
            return Ok(e);
        }
        let e = measure(n, seed, distribution, Samples::Random, policy)?;
        measured.push((n, e));
        Ok(e)
    };
    let mut entries = Vec::with_capacity(sizes.len());
    for &n in sizes.iter().filter(|&&n| n <= MAX_DIRECT_N) {
        let eps_th = measure_once(n, &mut measured)?;
        entries.push(ThresholdEntry {
            n,
            eps_th,
            extrapolated: false,
        });
    }
    let mut fit = None;
    if sizes.iter().any(|&n| n > MAX_DIRECT_N) {
        for n in ANCHORS {
            measure_once(n, &mut measured)?;
        }
        let points: Vec<(f64, f64)> = measured
            .iter()
            .filter(|(n, _)| *n >= ANCHORS[0])
            .map(|&(n, e)| (n as f64, e))
            .collect();
        let (a, b) = power_fit(&points);
        fit = Some((a, b));
        for &n in sizes.iter().filter(|&&n| n > MAX_DIRECT_N) {
            entries.push(ThresholdEntry {
                n,
                eps_th: a * (n as f64).powf(b),
                extrapolated: true,
            });
        }
    }
    let order: Vec<usize> = sizes.to_vec();
    entries.sort_by_key(|e| order.iter().position(|&n| n == e.n));
    entries.dedup_by_key(|e| e.n);
    Ok(MachinePrecisionProfile { entries, fit })
}

/// Least squares for `y = a x^b` in log-log space.
fn power_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let b = crate::timing::log_log_slope(points);
    let n = points.len() as f64;
    let mean_lx = points.iter().map(|(x, _)| x.ln()).sum::<f64>() / n;
    let mean_ly = points.iter().map(|(_, y)| y.ln()).sum::<f64>() / n;
    ((mean_ly - b * mean_lx).exp(), b)
}
