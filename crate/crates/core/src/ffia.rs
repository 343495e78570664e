//! Fast Fourier interpolation between a uniform grid and arbitrary points.
//!
//! Both directions reduce to the cotangent sum
//! `h(y) = sum_k w_k cot((y - x_k) / 2)`, which is split per level-2 quadrant
//! into a singular part `2 sum w / (y - x)` (handled by the MLFMM) and a
//! regular part expanded in Bernoulli series and collapsed into one
//! polynomial per quadrant.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, FfiaError, Result};
use crate::mlfmm::{self, TranslationOperators};
use crate::partition::{
    reduce_angle, wrap_displacement, CircleTree, Level2Assignment, QUADRANTS, TOP_LEVEL,
};
use crate::special::{
    grid_point, modulation_f, BernoulliRatioTable, TruncationParams, SINGULARITY_TOLERANCE,
};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Minimum wrapped distance between points for the inverse coefficients.
pub const SEPARATION_TOLERANCE: f64 = 1e-10;

/// Which set plays the source role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Grid samples to scattered points: sources on the grid.
    Forward,
    /// Scattered samples to the grid: sources at the scattered points.
    Inverse,
}

/// Precomputed data structure for repeated applies on a fixed point set.
#[derive(Debug, Clone)]
pub struct FfiaPlan {
    params: TruncationParams,
    direction: Direction,
    grid_size: usize,
    points: Vec<f64>,
    tree: CircleTree,
    level2: Level2Assignment,
    bernoulli: BernoulliRatioTable,
    /// `|B_{2m}| / m` for `m = 1..=q`.
    series_weights: Vec<f64>,
    operators: TranslationOperators,
    target_quadrant: Vec<u8>,
    coincidences: Vec<(usize, usize)>,
    skip: Vec<bool>,
    modulation: Vec<Complex64>,
    config_hash: u64,
}

impl FfiaPlan {
    /// Plan for grid samples (`grid_size` of them) to `points`. Points are
    /// reduced into `[0, 2pi)`.
    pub fn forward(grid_size: usize, points: &[f64], params: TruncationParams) -> Result<Self> {
        if grid_size == 0 {
            return Err(FfiaError::InvalidArgument(
                "grid size must be positive".into(),
            ));
        }
        let points = reduce_all(points)?;
        let grid = uniform_grid(grid_size);
        let coincidences: Vec<(usize, usize)> = points
            .iter()
            .enumerate()
            .filter_map(|(j, &y)| nearest_coincident_node(y, grid_size).map(|k| (j, k)))
            .collect();
        let mut skip = vec![false; points.len()];
        for &(j, _) in &coincidences {
            skip[j] = true;
        }
        let modulation = points.iter().map(|&y| modulation_f(y, grid_size)).collect();
        Self::assemble(
            params,
            Direction::Forward,
            grid_size,
            &grid,
            points,
            coincidences,
            skip,
            modulation,
        )
    }

    /// Plan for samples at `points` back to a grid of the same size.
    pub fn inverse(points: &[f64], params: TruncationParams) -> Result<Self> {
        let grid_size = points.len();
        if grid_size == 0 {
            return Err(FfiaError::InvalidArgument("need at least one point".into()));
        }
        let points = reduce_all(points)?;
        if let Some((j, &y)) = points
            .iter()
            .enumerate()
            .find(|(_, &y)| nearest_coincident_node(y, grid_size).is_some())
        {
            return Err(FfiaError::DegenerateConfiguration(format!(
                "point {j} at {y} coincides with a grid node"
            )));
        }
        let grid = uniform_grid(grid_size);
        let skip = vec![false; grid_size];
        Self::assemble(
            params,
            Direction::Inverse,
            grid_size,
            &grid,
            points,
            Vec::new(),
            skip,
            Vec::new(),
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        params: TruncationParams,
        direction: Direction,
        grid_size: usize,
        grid: &[f64],
        points: Vec<f64>,
        coincidences: Vec<(usize, usize)>,
        skip: Vec<bool>,
        modulation: Vec<Complex64>,
    ) -> Result<Self> {
        let tree = match direction {
            Direction::Forward => CircleTree::build(grid, &points, params.l_max())?,
            Direction::Inverse => CircleTree::build(&points, grid, params.l_max())?,
        };
        let level2 = tree.level2_assignment();
        let target_quadrant = tree
            .target_positions()
            .iter()
            .map(|&y| tree.box_of(TOP_LEVEL, y) as u8)
            .collect();
        let bernoulli = BernoulliRatioTable::new(params.q())?;
        let series_weights = series_weights(&bernoulli);
        let operators = TranslationOperators::new(params.p(), params.l_max())?;
        let config_hash = configuration_hash(grid_size, &points);
        Ok(Self {
            params,
            direction,
            grid_size,
            points,
            tree,
            level2,
            bernoulli,
            series_weights,
            operators,
            target_quadrant,
            coincidences,
            skip,
            modulation,
            config_hash,
        })
    }

    pub fn params(&self) -> &TruncationParams {
        &self.params
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// The scattered points, reduced into `[0, 2pi)`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn tree(&self) -> &CircleTree {
        &self.tree
    }

    pub fn level2(&self) -> &Level2Assignment {
        &self.level2
    }

    pub fn bernoulli(&self) -> &BernoulliRatioTable {
        &self.bernoulli
    }

    /// `(target index, grid index)` pairs closer than the singularity
    /// tolerance; forward plans only.
    pub fn coincidences(&self) -> &[(usize, usize)] {
        &self.coincidences
    }

    pub fn config_hash(&self) -> u64 {
        self.config_hash
    }

    pub fn source_count(&self) -> usize {
        self.tree.source_positions().len()
    }

    pub fn target_count(&self) -> usize {
        self.tree.target_positions().len()
    }

    /// Level-2 moments `alpha^(1)`, `alpha^(2)` and the reordered polynomial
    /// coefficients `d_l` of every quadrant.
    pub fn accumulate_moments(&self, weights: &[Complex64]) -> Result<RegularPart> {
        check_len("weights", self.source_count(), weights.len())?;
        let len = 2 * self.params.q();
        let sources = self.tree.source_positions();
        let quadrants: Vec<QuadrantPolynomial> = (0..QUADRANTS)
            .into_par_iter()
            .map(|n| {
                let quadrant = self.level2.quadrant(n);
                let center = quadrant.center;
                let mut alpha1 = vec![ZERO; len];
                let mut alpha2 = vec![ZERO; len];
                for &k in &quadrant.omega1 {
                    // center - x~, with x~ the shift of x within pi of the quadrant
                    let v = -wrap_displacement(sources[k], center);
                    accumulate_scaled_powers(&mut alpha1, weights[k], v);
                }
                for &k in &quadrant.omega2 {
                    // center - x^, with x^ = x + pi carried into the quadrant
                    let v = -wrap_displacement(sources[k] + PI, center);
                    accumulate_scaled_powers(&mut alpha2, weights[k], v);
                }
                let d = reorder(&self.series_weights, &alpha1, &alpha2);
                QuadrantPolynomial::new(center, alpha1, alpha2, d)
            })
            .collect();
        let quadrants: [QuadrantPolynomial; QUADRANTS] =
            quadrants.try_into().expect("one polynomial per quadrant");
        Ok(RegularPart { quadrants })
    }

    /// `h_j = sum_k w_k cot((y_j - x_k) / 2)` for every target. Entries of
    /// coincident targets are NaN.
    pub fn cot_sum(&self, weights: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len("weights", self.source_count(), weights.len())?;
        let regular = self.accumulate_moments(weights)?;
        let singular = mlfmm::apply(&self.tree, &self.operators, weights, Some(&self.skip))?;
        let targets = self.tree.target_positions();
        Ok(singular
            .into_par_iter()
            .enumerate()
            .map(|(j, s)| {
                if self.skip[j] {
                    Complex64::new(f64::NAN, f64::NAN)
                } else {
                    2.0 * s + regular.eval(targets[j], self.target_quadrant[j] as usize)
                }
            })
            .collect())
    }

    /// Interpolates grid samples `f` to the plan's points:
    /// `g_j = F_j (-(S + i h_j) / 2)` with `S = sum f`.
    pub fn forward_apply(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.expect_direction(Direction::Forward)?;
        check_len("grid samples", self.grid_size, f.len())?;
        let total: Complex64 = f.iter().sum();
        let mut g = self.cot_sum(f)?;
        g.par_iter_mut()
            .zip(&self.modulation)
            .for_each(|(h, modulation)| {
                *h = modulation * (-0.5 * (total + Complex64::i() * *h));
            });
        for &(j, k) in &self.coincidences {
            g[j] = f[k];
        }
        Ok(g)
    }

    /// Recovers grid samples from samples `g` at the plan's points:
    /// `f_k = C_k (-(T + i h'_k) / 2)` with `w_j = D_j g_j`, `T = sum w`.
    pub fn inverse_apply(&self, coeffs: &InverseCoeffs, g: &[Complex64]) -> Result<Vec<Complex64>> {
        self.expect_direction(Direction::Inverse)?;
        if coeffs.config_hash != self.config_hash || coeffs.n != self.grid_size {
            return Err(FfiaError::InvalidArgument(
                "inverse coefficients were computed for a different point set".into(),
            ));
        }
        check_len("scattered samples", self.grid_size, g.len())?;
        let shift = coeffs.reference_log_magnitude;
        let weights: Vec<Complex64> = coeffs
            .d
            .iter()
            .zip(g)
            .map(|(d, g)| d.to_complex_shifted(-shift) * g)
            .collect();
        let total: Complex64 = weights.iter().sum();
        let h = self.cot_sum(&weights)?;
        Ok(h.into_iter()
            .zip(&coeffs.c)
            .map(|(h, c)| c.to_complex_shifted(shift) * (-0.5 * (total + Complex64::i() * h)))
            .collect())
    }

    fn expect_direction(&self, wanted: Direction) -> Result<()> {
        if self.direction == wanted {
            Ok(())
        } else {
            Err(FfiaError::InvalidArgument(format!(
                "plan built for {:?}, not {wanted:?}",
                self.direction
            )))
        }
    }
}

fn reduce_all(points: &[f64]) -> Result<Vec<f64>> {
    points
        .iter()
        .enumerate()
        .map(|(j, &y)| {
            if y.is_finite() {
                Ok(reduce_angle(y))
            } else {
                Err(FfiaError::InvalidArgument(format!(
                    "point {j} is not finite"
                )))
            }
        })
        .collect()
}

/// `x_k = 2 pi k / N`, `k = 0..N`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| grid_point(k, n)).collect()
}

fn nearest_node(y: f64, n: usize) -> usize {
    let k = (y * n as f64 / std::f64::consts::TAU).round() as usize;
    k % n
}

fn nearest_coincident_node(y: f64, n: usize) -> Option<usize> {
    let k = nearest_node(y, n);
    (wrap_displacement(y, grid_point(k, n)).abs() < SINGULARITY_TOLERANCE).then_some(k)
}

/// Adds `w v^l / l!` into `alpha[l]`.
fn accumulate_scaled_powers(alpha: &mut [Complex64], w: Complex64, v: f64) {
    let mut term = w;
    for (l, a) in alpha.iter_mut().enumerate() {
        *a += term;
        term *= v / (l + 1) as f64;
    }
}

/// `|B_{2m}| / m = r[m] (2m)! / m`, with the factorial carried along `m`.
fn series_weights(table: &BernoulliRatioTable) -> Vec<f64> {
    let mut factorial = 1.0;
    (1..=table.len())
        .map(|m| {
            factorial *= ((2 * m - 1) * (2 * m)) as f64;
            table.ratio(m) * factorial / m as f64
        })
        .collect()
}

/// `d_l = sum_{m = floor(l/2)+1}^{q} (|B_{2m}|/m) [alpha1_{2m-l-1} + (4^m - 1) alpha2_{2m-l-1}]`.
fn reorder(series_weights: &[f64], alpha1: &[Complex64], alpha2: &[Complex64]) -> Vec<Complex64> {
    let q = series_weights.len();
    (0..2 * q)
        .map(|l| {
            let mut acc = ZERO;
            for m in l / 2 + 1..=q {
                let idx = 2 * m - l - 1;
                let tan_factor = 4f64.powi(m as i32) - 1.0;
                acc += series_weights[m - 1] * (alpha1[idx] + alpha2[idx] * tan_factor);
            }
            acc
        })
        .collect()
}

/// Regular-part polynomial of one quadrant.
#[derive(Debug, Clone)]
pub struct QuadrantPolynomial {
    pub center: f64,
    pub alpha1: Vec<Complex64>,
    pub alpha2: Vec<Complex64>,
    pub d: Vec<Complex64>,
    /// `d_l / l!`
    taylor: Vec<Complex64>,
}

impl QuadrantPolynomial {
    pub fn new(
        center: f64,
        alpha1: Vec<Complex64>,
        alpha2: Vec<Complex64>,
        d: Vec<Complex64>,
    ) -> Self {
        let mut inv_factorial = 1.0;
        let taylor = d
            .iter()
            .enumerate()
            .map(|(l, dl)| {
                if l > 0 {
                    inv_factorial /= l as f64;
                }
                dl * inv_factorial
            })
            .collect();
        Self {
            center,
            alpha1,
            alpha2,
            d,
            taylor,
        }
    }

    /// `-sum_l (d_l / l!) (y - center)^l` by Horner's rule.
    pub fn eval(&self, y: f64) -> Complex64 {
        let u = y - self.center;
        -self.taylor.iter().rev().fold(ZERO, |acc, c| acc * u + c)
    }
}

/// Per-quadrant regular parts of the cotangent sum.
#[derive(Debug, Clone)]
pub struct RegularPart {
    pub quadrants: [QuadrantPolynomial; QUADRANTS],
}

impl RegularPart {
    /// Regular part at `y`, which must lie in `quadrant`'s arc.
    pub fn eval(&self, y: f64, quadrant: usize) -> Complex64 {
        self.quadrants[quadrant].eval(y)
    }
}

/// A complex number stored as `exp(log_magnitude) * e^{i phase}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogComplex {
    pub log_magnitude: f64,
    pub phase: f64,
}

impl LogComplex {
    pub fn to_complex(self) -> Complex64 {
        self.to_complex_shifted(0.0)
    }

    /// `exp(log_magnitude + shift) e^{i phase}`.
    pub fn to_complex_shifted(self, shift: f64) -> Complex64 {
        Complex64::from_polar((self.log_magnitude + shift).exp(), self.phase)
    }
}

impl std::ops::Mul for LogComplex {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        Self {
            log_magnitude: self.log_magnitude + other.log_magnitude,
            phase: wrap_phase(self.phase + other.phase),
        }
    }
}

fn wrap_phase(phase: f64) -> f64 {
    crate::partition::wrap_angle(phase)
}

/// The `C_k` and `D_j` factors of the inverse kernel
/// `L_kj = C_k G(x_k - y_j) D_j`, in log-magnitude form.
#[derive(Debug, Clone)]
pub struct InverseCoeffs {
    n: usize,
    c: Vec<LogComplex>,
    d: Vec<LogComplex>,
    /// Largest `log |D_j|`; factored out of the weights during the apply.
    reference_log_magnitude: f64,
    config_hash: u64,
}

impl InverseCoeffs {
    /// Direct `O(N^2)` products
    /// `C_k = (-1)^k prod_j sin((x_k - y_j)/2)` and
    /// `D_j = 2i e^{-iN y_j/2} / prod_{k != j} sin((y_j - y_k)/2)`.
    pub fn precompute(points: &[f64]) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(FfiaError::InvalidArgument("need at least one point".into()));
        }
        let y = reduce_all(points)?;
        check_separation(&y)?;
        let grid = uniform_grid(n);

        let c = grid
            .par_iter()
            .enumerate()
            .map(|(k, &x)| {
                let mut acc = LogComplex {
                    log_magnitude: 0.0,
                    phase: if k % 2 == 0 { 0.0 } else { PI },
                };
                for &yj in &y {
                    acc = acc * log_half_sine(x - yj);
                }
                acc
            })
            .collect();
        let d: Vec<LogComplex> = y
            .par_iter()
            .enumerate()
            .map(|(j, &yj)| {
                let mut denom = LogComplex {
                    log_magnitude: 0.0,
                    phase: 0.0,
                };
                for (k, &yk) in y.iter().enumerate() {
                    if k != j {
                        denom = denom * log_half_sine(yj - yk);
                    }
                }
                LogComplex {
                    log_magnitude: 2f64.ln() - denom.log_magnitude,
                    phase: wrap_phase(
                        0.5 * PI
                            - (0.5 * n as f64 * yj).rem_euclid(std::f64::consts::TAU)
                            - denom.phase,
                    ),
                }
            })
            .collect();
        let reference_log_magnitude = d
            .iter()
            .map(|v| v.log_magnitude)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self {
            n,
            c,
            d,
            reference_log_magnitude,
            config_hash: configuration_hash(n, &y),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn c(&self) -> &[LogComplex] {
        &self.c
    }

    pub fn d(&self) -> &[LogComplex] {
        &self.d
    }

    pub fn config_hash(&self) -> u64 {
        self.config_hash
    }
}

/// `sin(d / 2)` for `d` in `(-2pi, 2pi)`, evaluated on the wrapped difference
/// so that small values near `+-2pi` keep their relative accuracy.
fn log_half_sine(d: f64) -> LogComplex {
    let wrapped = wrap_displacement(d, 0.0);
    let mut s = (0.5 * wrapped).sin();
    if wrapped != d {
        s = -s;
    }
    LogComplex {
        log_magnitude: s.abs().ln(),
        phase: if s < 0.0 { PI } else { 0.0 },
    }
}

fn check_separation(y: &[f64]) -> Result<()> {
    let n = y.len();
    for (j, &yj) in y.iter().enumerate() {
        let k = nearest_node(yj, n);
        let gap = wrap_displacement(yj, grid_point(k, n)).abs();
        if gap < SEPARATION_TOLERANCE {
            return Err(FfiaError::DegenerateConfiguration(format!(
                "point {j} lies {gap:e} from grid node {k}"
            )));
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].total_cmp(&y[b]));
    for w in 0..n {
        let (a, b) = (order[w], order[(w + 1) % n]);
        if a == b {
            continue;
        }
        let gap = wrap_displacement(y[b], y[a]).abs();
        if gap < SEPARATION_TOLERANCE {
            return Err(FfiaError::DegenerateConfiguration(format!(
                "points {a} and {b} are only {gap:e} apart"
            )));
        }
    }
    Ok(())
}

/// FNV-1a over the grid size and the bit patterns of the reduced points.
pub fn configuration_hash(n: usize, points: &[f64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut hash = OFFSET;
    let mut feed = |bytes: [u8; 8]| {
        for b in bytes {
            hash ^= u64::from(b);
            hash = hash.wrapping_mul(PRIME);
        }
    };
    feed((n as u64).to_le_bytes());
    for y in points {
        feed(y.to_bits().to_le_bytes());
    }
    hash
}
