//! Acceptance criteria, one PASS/FAIL line each. Runtime limits are part of
//! every criterion: a run over its limit fails.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use ffia::mlfmm::mlfmm_apply;
use ffia::oracle::direct_forward;
use ffia::special::{
    cot_series_tail, eps_q_bound, select_truncations, tan_series, total_error_bound,
};
use ffia::{
    dft_forward, dft_inverse, inufft, nufft, BernoulliRatioTable, CircleTree, EmpiricalPolicy,
    FfiaPlan, Spectrum, TruncationParams, UniformSamples,
};
use ffia_bench::sample;
use ffia_bench::threshold::estimate_machine_threshold;
use ffia_bench::timing::{log_log_slope, measure, REPETITIONS};
use ffia_bench::TargetDistribution;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    limit: Duration,
    single_thread: bool,
    run: fn() -> Outcome,
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn quadrant_of(x: f64) -> usize {
    ((x / FRAC_PI_2) as usize).min(3)
}

fn wrap(mut t: f64) -> f64 {
    while t > PI {
        t -= TAU;
    }
    while t < -PI {
        t += TAU;
    }
    t
}

// ---- oracles ----

const BITS: usize = 64;

/// Rounds the leading mantissa word; `value = 0.m * 2^e`.
fn big_to_f64(x: &BigFloat) -> f64 {
    let (words, _, sign, exponent, _) = x.as_raw_parts().expect("finite value");
    let top = *words.last().expect("nonempty mantissa") as f64;
    let v = top * 2f64.powi(exponent - 64);
    if sign == Sign::Neg {
        -v
    } else {
        v
    }
}

/// For `s` in `(-pi/2, pi/2]`: `cot(s) - 1/s` and `-tan(s/2)` in 64-bit
/// arithmetic, from one tangent and `tan s = 2u / (1 - u^2)`.
fn cot_minus_pole_and_neg_tan(s: f64, cc: &mut Consts) -> (f64, f64) {
    let rm = RoundingMode::ToEven;
    let one = BigFloat::from_f64(1.0, BITS);
    let two = BigFloat::from_f64(2.0, BITS);
    let sb = BigFloat::from_f64(s, BITS);
    let u = sb.div(&two, BITS, rm).tan(BITS, rm, cc);
    let cot = one
        .sub(&u.mul(&u, BITS, rm), BITS, rm)
        .div(&two.mul(&u, BITS, rm), BITS, rm);
    let pole = one.div(&sb, BITS, rm);
    (big_to_f64(&cot.sub(&pole, BITS, rm)), -big_to_f64(&u))
}

/// `|B_{2m}| / (2m)!` for `m = 1..=count` from exact rationals.
fn bernoulli_ratios_exact(count: usize) -> Vec<f64> {
    let n = 2 * count;
    let mut a = vec![BigRational::zero(); n + 1];
    let mut b = Vec::with_capacity(n + 1);
    for m in 0..=n {
        a[m] = BigRational::new(BigInt::one(), BigInt::from(m + 1));
        for j in (1..=m).rev() {
            a[j - 1] = (&a[j - 1] - &a[j]) * BigRational::from_integer(BigInt::from(j));
        }
        b.push(a[0].clone());
    }
    let mut factorial = BigInt::one();
    (1..=count)
        .map(|m| {
            factorial *= BigInt::from((2 * m - 1) * 2 * m);
            (b[2 * m].abs() / BigRational::from_integer(factorial.clone()))
                .to_f64()
                .unwrap()
        })
        .collect()
}

/// `2^{1-2q} / (3 pi (1 - 2^{-2q-1}))`.
fn eps_q(q: usize) -> f64 {
    let q = q as i32;
    2f64.powi(1 - 2 * q) / (3.0 * PI * (1.0 - 2f64.powi(-2 * q - 1)))
}

/// Dense `K_jk = F_j G(y_j - x_k)` applied to `f`.
fn kernel_matrix_apply(f: &[Complex64], y: &[f64]) -> Vec<Complex64> {
    let n = f.len();
    y.iter()
        .map(|&yj| {
            let big_f = (Complex64::from_polar(1.0, n as f64 * yj) - 1.0) / n as f64;
            let s: Complex64 = f
                .iter()
                .enumerate()
                .map(|(k, fk)| {
                    fk / (Complex64::from_polar(1.0, yj - TAU * k as f64 / n as f64) - 1.0)
                })
                .sum();
            big_f * s
        })
        .collect()
}

/// `sum_k w_k / (y - x_k)` over sources outside the quadrant opposite `y`.
fn excluded_direct_sum(sources: &[f64], targets: &[f64], weights: &[Complex64]) -> Vec<Complex64> {
    targets
        .iter()
        .map(|&y| {
            let qy = quadrant_of(y);
            sources
                .iter()
                .zip(weights)
                .filter(|(&x, _)| (quadrant_of(x) + 4 - qy) % 4 != 2)
                .map(|(&x, w)| w / wrap(y - x))
                .sum()
        })
        .collect()
}

/// Regular part of the cotangent sum as a plain double sum over sources and
/// series terms.
fn naive_regular_part(sources: &[f64], weights: &[Complex64], y: f64, r: &[f64]) -> Complex64 {
    let qy = quadrant_of(y);
    let mut acc = Complex64::new(0.0, 0.0);
    for (&x, w) in sources.iter().zip(weights) {
        let opposite = (quadrant_of(x) + 4 - qy) % 4 == 2;
        let t = wrap(if opposite { y - x - PI } else { y - x });
        let mut s = 0.0;
        for (i, rm) in r.iter().enumerate() {
            let m = i + 1;
            let factor = if opposite {
                4f64.powi(m as i32) - 1.0
            } else {
                1.0
            };
            s += factor * rm * t.powi(2 * m as i32 - 1);
        }
        acc += w * (-2.0 * s);
    }
    acc
}

// ---- criteria ----

fn analytic_constant() -> Outcome {
    let n = 1 << 12;
    let y = sample::targets(n, TargetDistribution::Uniform, 42);
    let params = TruncationParams::plan(1e-6, n, n, &EmpiricalPolicy::default())
        .map_err(|e| e.to_string())?;
    let l_max = params.l_max();
    let plan = FfiaPlan::forward(n, &y, params).map_err(|e| e.to_string())?;
    let g = plan
        .forward_apply(&vec![Complex64::new(1.0, 0.0); n])
        .map_err(|e| e.to_string())?;
    let err = g.iter().map(|v| (v - 1.0).norm()).fold(0.0, f64::max);
    check(
        err <= 1e-6,
        format!("max |g - 1| = {err:.3e} (l_max={l_max})"),
    )
}

fn oracle_equivalence() -> Outcome {
    let n = 1 << 10;
    let mut r = rng(2);
    let y: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..TAU)).collect();
    let f: Vec<Complex64> = (0..n).map(|_| Complex64::new(r.gen(), 0.0)).collect();
    let params = TruncationParams::plan(1e-12, n, n, &EmpiricalPolicy::default())
        .map_err(|e| e.to_string())?;
    let fast = FfiaPlan::forward(n, &y, params)
        .and_then(|p| p.forward_apply(&f))
        .map_err(|e| e.to_string())?;
    let dense = kernel_matrix_apply(&f, &y);
    let library_dense = direct_forward(&f, &y).map_err(|e| e.to_string())?;
    let err = max_abs_diff(&fast, &dense);
    let oracle_gap = max_abs_diff(&library_dense, &dense);
    check(
        err <= 1e-10 && oracle_gap <= 1e-10,
        format!("max |ffia - dense| = {err:.3e}, library direct vs dense {oracle_gap:.3e}"),
    )
}

fn series_bounds() -> Outcome {
    let table = BernoulliRatioTable::new(12).map_err(|e| e.to_string())?;
    let mut cc = Consts::new().map_err(|e| format!("{e:?}"))?;
    let mut r = rng(3);
    let (mut worst_cot, mut worst_tan) = (0.0f64, 0.0f64);
    for q in 1..=12 {
        if (eps_q_bound(q) - eps_q(q)).abs() > 1e-15 * eps_q(q) {
            return Err(format!("library eps_q({q}) disagrees with the closed form"));
        }
    }
    for _ in 0..10_000 {
        // cot(t/2) at t = 2s covers [-pi, pi]; the tan series runs at s
        let s = loop {
            let s: f64 = r.gen_range(-FRAC_PI_2..=FRAC_PI_2);
            if s != 0.0 {
                break s;
            }
        };
        let t = 2.0 * s;
        let (cot_exact, tan_exact) = cot_minus_pole_and_neg_tan(s, &mut cc);
        for q in 1..=12 {
            let cot = cot_series_tail(t, q, &table).map_err(|e| e.to_string())?;
            let tan = tan_series(s, q, &table).map_err(|e| e.to_string())?;
            // the truncated sums are half the residuals of -2 sum(...)
            worst_cot = worst_cot.max((cot_exact - cot).abs() / 2.0 / eps_q(q));
            worst_tan = worst_tan.max((tan_exact - tan).abs() / 2.0 / (2.0 * eps_q(q)));
        }
    }
    check(
        worst_cot <= 1.0 && worst_tan <= 1.0,
        format!("max cot error / eps_q = {worst_cot:.6}, max tan error / 2 eps_q = {worst_tan:.6}"),
    )
}

fn mlfmm_bound() -> Outcome {
    let n = 1 << 10;
    let mut r = rng(4);
    let sources: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..TAU)).collect();
    let targets: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..TAU)).collect();
    let weights: Vec<Complex64> = (0..n).map(|_| Complex64::new(r.gen(), 0.0)).collect();
    let max_w = weights.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let direct = excluded_direct_sum(&sources, &targets, &weights);
    let mut detail = Vec::new();
    let mut ok = true;
    for l_max in [3, 4, 5] {
        let (_, p) = select_truncations(1e-6, l_max).map_err(|e| e.to_string())?;
        let tree = CircleTree::build(&sources, &targets, l_max).map_err(|e| e.to_string())?;
        let got = mlfmm_apply(&tree, &weights, p).map_err(|e| e.to_string())?;
        let err = max_abs_diff(&got, &direct);
        let bound = 5.0 / PI * 2f64.powi(l_max as i32) * 3f64.powi(-(p as i32)) * max_w;
        ok &= err <= bound;
        detail.push(format!("l={l_max} p={p} err={err:.2e} bound={bound:.2e}"));
    }
    check(ok, detail.join("; "))
}

fn parameter_selection() -> Outcome {
    let qp = select_truncations(1e-6, 5).map_err(|e| e.to_string())?;
    let bound = total_error_bound(10, 17, 5);
    check(
        qp == (10, 17) && bound <= 2e-6,
        format!("(q, p) = {qp:?}, total bound = {bound:.3e}"),
    )
}

fn near_linear_scaling() -> Outcome {
    let sizes: Vec<usize> = (12..=16).map(|k| 1 << k).collect();
    let policy = EmpiricalPolicy::default();
    let profile = estimate_machine_threshold(&sizes, 42, TargetDistribution::Uniform, &policy)
        .map_err(|e| e.to_string())?;
    let mut points = Vec::new();
    for &n in &sizes {
        let y = sample::targets(n, TargetDistribution::Uniform, 42);
        let f = sample::unit_weights(n, 42);
        let eps = profile.plan_eps(n).expect("profiled");
        let params = TruncationParams::plan(eps, n, n, &policy).map_err(|e| e.to_string())?;
        let plan = FfiaPlan::forward(n, &y, params).map_err(|e| e.to_string())?;
        let (t, g) = measure(REPETITIONS, || plan.forward_apply(&f));
        g.map_err(|e| e.to_string())?;
        points.push((n as f64, t.median));
    }
    let slope = log_log_slope(&points);
    check(
        slope <= 1.2,
        format!("log-log slope {slope:.3} over 2^12..2^16"),
    )
}

fn crossover() -> Outcome {
    let policy = EmpiricalPolicy::default();
    let mut ratios = Vec::new();
    for k in 10..=13 {
        let n = 1usize << k;
        let y = sample::targets(n, TargetDistribution::Uniform, 42);
        let f = sample::unit_weights(n, 42);
        let params = TruncationParams::plan(1e-6, n, n, &policy).map_err(|e| e.to_string())?;
        let (fast, g) = measure(REPETITIONS, || {
            FfiaPlan::forward(n, &y, params).and_then(|p| p.forward_apply(&f))
        });
        g.map_err(|e| e.to_string())?;
        let (direct, g) = measure(REPETITIONS, || direct_forward(&f, &y));
        g.map_err(|e| e.to_string())?;
        ratios.push((k, direct.median / fast.median));
    }
    let beats = ratios[0].1 > 1.0;
    let grows = ratios.windows(2).all(|w| w[1].1 > w[0].1);
    let detail = ratios
        .iter()
        .map(|(k, r)| format!("2^{k}: {r:.1}x"))
        .collect::<Vec<_>>()
        .join(", ");
    check(
        beats && grows,
        format!("direct / ffia (plan + apply) {detail}"),
    )
}

fn inverse_round_trip() -> Outcome {
    let n = 1 << 9;
    let y = sample::targets(n, TargetDistribution::Perturbed(0.10), 7);
    let mut r = rng(7);
    let c: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    let policy = EmpiricalPolicy::default();
    let spectrum = Spectrum::new(c.clone()).map_err(|e| e.to_string())?;
    let g = nufft(&spectrum, &y, 1e-9, &policy).map_err(|e| e.to_string())?;
    let back = inufft(&g, &y, 1e-9, &policy).map_err(|e| e.to_string())?;
    let err = max_abs_diff(back.as_slice(), &c);
    check(
        err <= 1e-6,
        format!("max |inufft(nufft(c)) - c| = {err:.3e}"),
    )
}

fn fft_self_tests() -> Outcome {
    let mut r = rng(9);
    let (mut worst_trip, mut worst_parseval) = (0.0f64, 0.0f64);
    for k in 0..=16 {
        let n = 1usize << k;
        let f: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let c = dft_forward(&UniformSamples::new(f.clone()).map_err(|e| e.to_string())?);
        let back = dft_inverse(&c);
        let largest = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        worst_trip = worst_trip.max(max_abs_diff(back.as_slice(), &f) / largest);
        let lhs: f64 = c.as_slice().iter().map(|z| z.norm_sqr()).sum();
        let rhs: f64 = f.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        worst_parseval = worst_parseval.max((lhs - rhs).abs() / rhs);
    }
    check(
        worst_trip <= 1e-12 && worst_parseval <= 1e-12,
        format!(
            "round trip {worst_trip:.2e}, Parseval {worst_parseval:.2e} (relative, N = 1..2^16)"
        ),
    )
}

fn moment_reordering() -> Outcome {
    let n = 256;
    let mut r = rng(10);
    let grid: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    let weights: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
        .collect();
    let mut worst = 0.0f64;
    for (eps, l_max) in [(1e-3, 3), (1e-6, 4), (1e-10, 5)] {
        let params = TruncationParams::for_level(eps, l_max).map_err(|e| e.to_string())?;
        let q = params.q();
        let ratios = bernoulli_ratios_exact(q);
        let plan = FfiaPlan::forward(n, &[1.0], params).map_err(|e| e.to_string())?;
        let part = plan
            .accumulate_moments(&weights)
            .map_err(|e| e.to_string())?;
        for quadrant in 0..4 {
            for _ in 0..50 {
                let y = quadrant as f64 * FRAC_PI_2 + r.gen_range(0.0..FRAC_PI_2);
                let want = naive_regular_part(&grid, &weights, y, &ratios);
                let got = part.eval(y, quadrant);
                worst = worst.max((got - want).norm() / want.norm());
            }
        }
    }
    check(
        worst <= 1e-12,
        format!("max relative deviation {worst:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria = [
        Criterion {
            id: 1,
            name: "analytic constant",
            limit: Duration::from_secs(5),
            single_thread: false,
            run: analytic_constant,
        },
        Criterion {
            id: 2,
            name: "oracle equivalence",
            limit: Duration::from_secs(10),
            single_thread: false,
            run: oracle_equivalence,
        },
        Criterion {
            id: 3,
            name: "series bounds",
            limit: Duration::from_secs(1),
            single_thread: false,
            run: series_bounds,
        },
        Criterion {
            id: 4,
            name: "MLFMM bound",
            limit: Duration::from_secs(5),
            single_thread: false,
            run: mlfmm_bound,
        },
        Criterion {
            id: 5,
            name: "parameter selection",
            limit: Duration::from_secs(1),
            single_thread: false,
            run: parameter_selection,
        },
        Criterion {
            id: 6,
            name: "near-linear scaling",
            limit: Duration::from_secs(120),
            single_thread: true,
            run: near_linear_scaling,
        },
        Criterion {
            id: 7,
            name: "crossover",
            limit: Duration::from_secs(60),
            single_thread: true,
            run: crossover,
        },
        Criterion {
            id: 8,
            name: "inverse round trip",
            limit: Duration::from_secs(10),
            single_thread: false,
            run: inverse_round_trip,
        },
        Criterion {
            id: 9,
            name: "FFT self-tests",
            limit: Duration::from_secs(5),
            single_thread: false,
            run: fft_self_tests,
        },
        Criterion {
            id: 10,
            name: "moment reordering",
            limit: Duration::from_secs(2),
            single_thread: false,
            run: moment_reordering,
        },
    ];
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = if c.single_thread {
            single.install(c.run)
        } else {
            (c.run)()
        };
        let elapsed = start.elapsed();
        let in_time = elapsed <= c.limit;
        let (status, detail) = match &outcome {
            Ok(d) if in_time => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over the time limit")),
            Err(d) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "{status} criterion {}: {} - {detail} [{:.2}s / {}s]",
            c.id,
            c.name,
            elapsed.as_secs_f64(),
            c.limit.as_secs()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
