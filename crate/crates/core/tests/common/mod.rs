//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use astro_float::{BigFloat, Consts, RoundingMode};
use nalgebra::{DMatrix, DVector};
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(0.0..TAU)).collect()
}

pub fn random_weights(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen::<f64>(), 0.0))
        .collect()
}

pub fn random_complex(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

/// Grid nodes moved by up to `fraction` of the spacing.
pub fn perturbed_grid(n: usize, fraction: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let h = TAU / n as f64;
    (0..n)
        .map(|k| {
            let u: f64 = rng.gen_range(-1.0..1.0);
            (k as f64 * h + u * fraction * h).rem_euclid(TAU)
        })
        .collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `B_0..=B_n` as exact rationals (Akiyama-Tanigawa; `B_1 = +1/2`).
pub fn bernoulli_exact(n: usize) -> Vec<BigRational> {
    let mut a = vec![BigRational::zero(); n + 1];
    let mut out = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a[m] = BigRational::new(BigInt::one(), BigInt::from(m + 1));
        for j in (1..=m).rev() {
            a[j - 1] = (&a[j - 1] - &a[j]) * BigRational::from_integer(BigInt::from(j));
        }
        out.push(a[0].clone());
    }
    out
}

/// `|B_{2m}| / (2m)!` for `m = 1..=count`, from exact arithmetic.
pub fn bernoulli_ratios_exact(count: usize) -> Vec<f64> {
    let b = bernoulli_exact(2 * count);
    let mut factorial = BigInt::one();
    let mut out = Vec::with_capacity(count);
    for m in 1..=count {
        factorial *= BigInt::from((2 * m - 1) * 2 * m);
        let ratio = b[2 * m].abs() / BigRational::from_integer(factorial.clone());
        out.push(ratio.to_f64().unwrap());
    }
    out
}

const BITS: usize = 256;

fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap()
}

/// `cot(t/2) - 2/t`, evaluated with 256-bit floats.
pub fn cot_half_minus_pole(t: f64, cc: &mut Consts) -> f64 {
    let rm = RoundingMode::ToEven;
    let tb = BigFloat::from_f64(t, BITS);
    let half = tb.div(&BigFloat::from_f64(2.0, BITS), BITS, rm);
    let cot = BigFloat::from_f64(1.0, BITS).div(&half.tan(BITS, rm, cc), BITS, rm);
    let pole = BigFloat::from_f64(2.0, BITS).div(&tb, BITS, rm);
    to_f64(&cot.sub(&pole, BITS, rm))
}

/// `-tan(t/2)` with 256-bit floats.
pub fn neg_tan_half(t: f64, cc: &mut Consts) -> f64 {
    let rm = RoundingMode::ToEven;
    let half = BigFloat::from_f64(t, BITS).div(&BigFloat::from_f64(2.0, BITS), BITS, rm);
    -to_f64(&half.tan(BITS, rm, cc))
}

pub fn consts() -> Consts {
    Consts::new().unwrap()
}

fn quadrant_of(x: f64) -> usize {
    ((x / FRAC_PI_2) as usize).min(3)
}

/// `sum_k w_k / (y_j - x~_k)` over the sources in the three quadrants around
/// each target, with the difference wrapped into `[-pi, pi]`.
pub fn excluded_direct_sum(
    sources: &[f64],
    targets: &[f64],
    weights: &[Complex64],
) -> Vec<Complex64> {
    targets
        .iter()
        .map(|&y| {
            let qy = quadrant_of(y);
            let mut acc = Complex64::new(0.0, 0.0);
            for (&x, w) in sources.iter().zip(weights) {
                if (quadrant_of(x) + 4 - qy) % 4 == 2 {
                    continue;
                }
                let mut t = y - x;
                if t > PI {
                    t -= TAU;
                } else if t < -PI {
                    t += TAU;
                }
                acc += w / t;
            }
            acc
        })
        .collect()
}

/// Regular part of `sum_k w_k cot((y - x_k)/2)` by the plain double sum over
/// sources and series terms, without any moment reordering.
pub fn naive_regular_part(sources: &[f64], weights: &[Complex64], y: f64, q: usize) -> Complex64 {
    let r = bernoulli_ratios_exact(q);
    let qy = quadrant_of(y);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, w) in sources.iter().zip(weights) {
        let opposite = (quadrant_of(x) + 4 - qy) % 4 == 2;
        let mut t = if opposite { y - x - PI } else { y - x };
        while t > PI {
            t -= TAU;
        }
        while t < -PI {
            t += TAU;
        }
        let mut s = 0.0;
        for m in 1..=q {
            let factor = if opposite {
                4f64.powi(m as i32) - 1.0
            } else {
                1.0
            };
            s += factor * r[m - 1] * t.powi(2 * m as i32 - 1);
        }
        acc += w * (-2.0 * s);
    }
    acc
}

/// `sum_n c_n e^{i n y}`.
pub fn direct_spectral_sum(c: &[Complex64], y: &[f64]) -> Vec<Complex64> {
    y.iter()
        .map(|&y| {
            c.iter()
                .enumerate()
                .map(|(n, cn)| cn * Complex64::from_polar(1.0, n as f64 * y))
                .sum()
        })
        .collect()
}

/// Solves `g_j = sum_n c_n e^{i n y_j}` for `c` by dense LU.
pub fn dense_spectrum_solve(g: &[Complex64], y: &[f64]) -> Vec<Complex64> {
    let n = y.len();
    let a = DMatrix::from_fn(n, n, |j, k| Complex64::from_polar(1.0, k as f64 * y[j]));
    let b = DVector::from_column_slice(g);
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

/// Sum of `|z|^2`.
pub fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}
