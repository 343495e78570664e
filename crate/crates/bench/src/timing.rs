//! Wall-clock measurement: median of repeated runs on the monotonic clock.

use std::time::Instant;

pub const REPETITIONS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Timing {
    pub const ZERO: Timing = Timing {
        median: 0.0,
        min: 0.0,
        max: 0.0,
    };
}

/// Runs `f` once untimed, then `reps` times on the clock. The last result
/// is kept.
pub fn measure<T>(reps: usize, mut f: impl FnMut() -> T) -> (Timing, T) {
    assert!(reps > 0);
    drop(f());
    let mut seconds = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let start = Instant::now();
        let value = f();
        seconds.push(start.elapsed().as_secs_f64());
        last = Some(value);
    }
    seconds.sort_by(f64::total_cmp);
    let timing = Timing {
        median: seconds[reps / 2],
        min: seconds[0],
        max: seconds[reps - 1],
    };
    (timing, last.expect("at least one repetition"))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
