//! Bernoulli-ratio tables, the interpolation kernels, the truncated cot/tan
//! series of the regular part, and the error bounds that drive the choice of
//! truncation numbers and tree depth.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use num_complex::Complex64;

use crate::error::{FfiaError, Result};
use crate::partition::wrap_angle;

/// Largest table the Bernoulli ratios are built for. `eps_q_bound` is far
/// below double precision long before this.
pub const MAX_TABLE_LEN: usize = 64;

/// Largest regular-series truncation the planner accepts.
pub const MAX_PLANNED_Q: usize = 20;

/// Wrapped kernel arguments at or below this magnitude are treated as
/// coincident points.
pub const SINGULARITY_TOLERANCE: f64 = 1e-14;

const TAN_DOMAIN_SLACK: f64 = 1e-12;

/// `r[m] = |B_{2m}| / (2m)!` for `m = 1..=len`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliRatioTable {
    ratios: Vec<f64>,
}

impl BernoulliRatioTable {
    /// Builds the table from `r[m] = 2 zeta(2m) / (2 pi)^{2m}`, so that
    /// neither the Bernoulli numbers nor the factorials are formed.
    pub fn new(q_max: usize) -> Result<Self> {
        if !(1..=MAX_TABLE_LEN).contains(&q_max) {
            return Err(FfiaError::InvalidArgument(format!(
                "Bernoulli table length {q_max} outside 1..={MAX_TABLE_LEN}"
            )));
        }
        let ratios = (1..=q_max)
            .map(|m| {
                let s = 2 * m as i32;
                2.0 * zeta_even(s) / TAU.powi(s)
            })
            .collect();
        Ok(Self { ratios })
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// `|B_{2m}| / (2m)!`, 1-based in `m`.
    pub fn ratio(&self, m: usize) -> f64 {
        self.ratios[m - 1]
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    fn check_q(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.len() {
            return Err(FfiaError::InvalidArgument(format!(
                "truncation q = {q} outside 1..={}",
                self.len()
            )));
        }
        Ok(())
    }
}

/// Riemann zeta at an even integer `s >= 2`: direct summation of the first
/// terms plus an Euler-Maclaurin tail.
fn zeta_even(s: i32) -> f64 {
    const HEAD: i32 = 256;
    let sf = f64::from(s);
    let mut sum = 0.0;
    for n in (1..HEAD).rev() {
        sum += f64::from(n).powi(-s);
    }
    let a = f64::from(HEAD);
    let tail = a.powf(1.0 - sf) / (sf - 1.0) + 0.5 * a.powi(-s) + sf * a.powi(-s - 1) / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * a.powi(-s - 3) / 720.0;
    sum + tail
}

/// `G(t) = 1 / (e^{it} - 1) = -(1 + i cot(t/2)) / 2`.
///
/// Evaluated through the cotangent form, which keeps full relative accuracy
/// near the singularity where `e^{it} - 1` cancels.
pub fn kernel_g(t: f64) -> Result<Complex64> {
    let w = wrap_angle(t);
    if w.abs() <= SINGULARITY_TOLERANCE {
        return Err(FfiaError::SingularKernel(w));
    }
    let cot = 1.0 / (0.5 * w).tan();
    Ok(Complex64::new(-0.5, -0.5 * cot))
}

/// `F(y) = (e^{iNy} - 1) / N`.
///
/// `Ny` is reduced against the nearest grid point before exponentiation, so
/// `F` vanishes exactly on the grid `2 pi k / N`.
pub fn modulation_f(y: f64, n: usize) -> Complex64 {
    assert!(n >= 1, "modulation needs N >= 1");
    let nf = n as f64;
    let k = (y * nf / TAU).round();
    let delta = y - grid_point_f(k, nf);
    let half = 0.5 * nf * delta;
    // e^{2i half} - 1 = 2i sin(half) e^{i half}
    let (s, c) = half.sin_cos();
    Complex64::new(-2.0 * s * s, 2.0 * s * c) / nf
}

/// `x_k = 2 pi k / N`. All grid positions go through this expression.
pub fn grid_point(k: usize, n: usize) -> f64 {
    grid_point_f(k as f64, n as f64)
}

fn grid_point_f(k: f64, n: f64) -> f64 {
    TAU * k / n
}

/// Regular part of `cot(t/2) = 2/t + tail(t)`, truncated after `q` terms:
/// `-2 sum_{m=1}^{q} r[m] t^{2m-1}`.
pub fn cot_series_tail(t: f64, q: usize, table: &BernoulliRatioTable) -> Result<f64> {
    table.check_q(q)?;
    if t.abs() > PI {
        return Err(FfiaError::Domain {
            value: t,
            limit: PI,
        });
    }
    let t2 = t * t;
    let mut acc = 0.0;
    for m in (1..=q).rev() {
        acc = acc * t2 + table.ratio(m);
    }
    Ok(-2.0 * t * acc)
}

/// Truncated series for `-tan(t/2)`:
/// `-2 sum_{m=1}^{q} (2^{2m} - 1) r[m] t^{2m-1}`.
pub fn tan_series(t: f64, q: usize, table: &BernoulliRatioTable) -> Result<f64> {
    table.check_q(q)?;
    let limit = FRAC_PI_2 + TAN_DOMAIN_SLACK;
    if t.abs() > limit {
        return Err(FfiaError::Domain { value: t, limit });
    }
    let t2 = t * t;
    let mut acc = 0.0;
    for m in (1..=q).rev() {
        let factor = 4f64.powi(m as i32) - 1.0;
        acc = acc * t2 + factor * table.ratio(m);
    }
    Ok(-2.0 * t * acc)
}

/// Bound on the truncated Bernoulli series `sum_{m>q} r[m] |t|^{2m-1}` for
/// `|t| <= pi`: `2^{1-2q} / (3 pi (1 - 2^{-2q-1}))`.
///
/// The same series with the `(2^{2m} - 1)` weights on `|t| <= pi/2` is
/// bounded by twice this value.
pub fn eps_q_bound(q: usize) -> f64 {
    assert!(q >= 1, "q must be positive");
    let q = q as i32;
    2f64.powi(1 - 2 * q) / (3.0 * PI * (1.0 - 2f64.powi(-2 * q - 1)))
}

/// Truncation numbers `(q, p)` for a prescribed error and tree depth.
pub fn select_truncations(eps: f64, l_max: usize) -> Result<(usize, usize)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(FfiaError::InvalidArgument(format!(
            "prescribed error {eps} outside (0, 1)"
        )));
    }
    if l_max < 2 {
        return Err(FfiaError::InvalidArgument(format!(
            "tree depth {l_max} below 2"
        )));
    }
    let ratio = 3.0 * PI / (10.0 * eps);
    let q = (0.5 * ratio.log2()).ceil();
    let p = (ratio.ln() / 3f64.ln() + l_max as f64 / 3f64.log2() + 1.0).ceil();
    Ok((q.max(1.0) as usize, p.max(1.0) as usize))
}

/// Combined truncation error estimate `(5 / 3pi) (4^{-q} + 2^{l_max} 3^{1-p})`.
pub fn total_error_bound(q: usize, p: usize, l_max: usize) -> f64 {
    5.0 / (3.0 * PI) * (4f64.powi(-(q as i32)) + 2f64.powi(l_max as i32) * 3f64.powi(1 - p as i32))
}

/// Smallest prescribed error the planner accepts (`q <= MAX_PLANNED_Q`).
pub fn min_plannable_eps() -> f64 {
    3.0 * PI / (10.0 * 4f64.powi(MAX_PLANNED_Q as i32)) * (1.0 + 1e-9)
}

/// Operation count of a single translation as a function of `p`.
pub struct CostModel {
    translation_cost: Box<dyn Fn(usize) -> f64 + Send + Sync>,
}

impl CostModel {
    /// `cost` must be nondecreasing in `p`.
    pub fn new(cost: impl Fn(usize) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            translation_cost: Box::new(cost),
        }
    }

    /// Dense `p x p` translations: `P(p) = 2 p^2`.
    pub fn dense() -> Self {
        Self::new(|p| 2.0 * (p * p) as f64)
    }

    pub fn translation_cost(&self, p: usize) -> f64 {
        (self.translation_cost)(p)
    }
}

impl Default for CostModel {
    fn default() -> Self {
        Self::dense()
    }
}

impl fmt::Debug for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CostModel")
            .field("P(8)", &self.translation_cost(8))
            .finish()
    }
}

/// Deepest level that still leaves every box populated on average.
pub fn max_useful_level(sources: usize, targets: usize) -> usize {
    let smallest = sources.min(targets).max(1);
    (usize::BITS - 1 - smallest.leading_zeros()) as usize
}

/// Cost-optimal tree depth `round(0.5 log2(NM / 2P(p)))`, clamped to
/// `[2, floor(log2 min(N, M))]`.
pub fn select_level(sources: usize, targets: usize, p: usize, cost: &CostModel) -> usize {
    let nm = sources as f64 * targets as f64;
    let raw = (0.5 * (nm / (2.0 * cost.translation_cost(p))).log2()).round();
    let upper = max_useful_level(sources, targets).max(2) as f64;
    if raw.is_nan() {
        return 2;
    }
    raw.clamp(2.0, upper) as usize
}

/// Empirical depth rule `log2 N - l_star`, clamped like [`select_level`].
pub fn empirical_level(sources: usize, targets: usize, l_star: usize) -> usize {
    let log_n = max_useful_level(sources, sources);
    let upper = max_useful_level(sources, targets).max(2);
    log_n.saturating_sub(l_star).clamp(2, upper)
}

/// Validated `(eps, q, p, l_max)` quadruple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    eps: f64,
    q: usize,
    p: usize,
    l_max: usize,
}

impl TruncationParams {
    /// `(q, p)` from [`select_truncations`] for a fixed depth.
    pub fn for_level(eps: f64, l_max: usize) -> Result<Self> {
        let (q, p) = select_truncations(eps, l_max)?;
        if q > MAX_PLANNED_Q {
            return Err(FfiaError::PrecisionBelowMachine {
                eps,
                q,
                max: MAX_PLANNED_Q,
            });
        }
        Ok(Self { eps, q, p, l_max })
    }

    /// Depth chosen by `policy`, iterated to a fixed point with `p` since
    /// the cost-driven depth depends on `p` and `p` on the depth.
    pub fn plan(
        eps: f64,
        sources: usize,
        targets: usize,
        policy: &dyn crate::policy::LevelPolicy,
    ) -> Result<Self> {
        let mut level = 2;
        let mut params = Self::for_level(eps, level)?;
        for _ in 0..16 {
            let next = policy.choose(sources, targets, params.p).max(2);
            if next == level {
                return Ok(params);
            }
            level = next;
            params = Self::for_level(eps, level)?;
        }
        Ok(params)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn error_bound(&self) -> f64 {
        total_error_bound(self.q, self.p, self.l_max)
    }
}
