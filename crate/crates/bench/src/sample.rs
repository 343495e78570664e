//! Seeded inputs. Every (seed, N, purpose) triple draws from its own ChaCha8
//! stream, so adding sizes to a sweep never changes the inputs of the others.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::TargetDistribution;

#[derive(Debug, Clone, Copy)]
pub enum Stream {
    Targets,
    Weights,
}

pub fn rng(seed: u64, n: usize, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tag = match stream {
        Stream::Targets => 0u64,
        Stream::Weights => 1,
    };
    rng.set_stream((n as u64) << 1 | tag);
    rng
}

/// `m` target points in `[0, 2pi)`. A perturbed grid always has `m` nodes.
pub fn targets(m: usize, distribution: TargetDistribution, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed, m, Stream::Targets);
    match distribution {
        TargetDistribution::Uniform => (0..m).map(|_| rng.gen_range(0.0..TAU)).collect(),
        TargetDistribution::Perturbed(fraction) => {
            let h = TAU / m as f64;
            (0..m)
                .map(|k| {
                    let u: f64 = rng.gen_range(-1.0..=1.0);
                    (k as f64 * h + u * fraction * h).rem_euclid(TAU)
                })
                .collect()
        }
    }
}

/// Real weights uniform in `[0, 1)`.
pub fn unit_weights(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = rng(seed, n, Stream::Weights);
    (0..n).map(|_| Complex64::new(rng.gen(), 0.0)).collect()
}
