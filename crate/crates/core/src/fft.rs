//! In-place iterative radix-2 FFT.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{FfiaError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    /// `e^{-i ...}` kernel.
    Negative,
    /// `e^{+i ...}` kernel.
    Positive,
}

/// Unnormalised transform `X_n = sum_k x_k e^{+-2 pi i n k / N}`.
pub fn fft_in_place(data: &mut [Complex64], sign: Sign) -> Result<()> {
    let n = data.len();
    if !n.is_power_of_two() {
        return Err(FfiaError::InvalidArgument(format!(
            "FFT length {n} is not a power of two"
        )));
    }
    if n == 1 {
        return Ok(());
    }
    bit_reverse_permute(data);

    let direction = match sign {
        Sign::Negative => -1.0,
        Sign::Positive => 1.0,
    };
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|k| Complex64::from_polar(1.0, direction * TAU * k as f64 / n as f64))
        .collect();

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for chunk in data.chunks_exact_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for (i, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
                let t = *b * twiddles[i * stride];
                *b = *a - t;
                *a += t;
            }
        }
        len *= 2;
    }
    Ok(())
}

fn bit_reverse_permute(data: &mut [Complex64]) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if i < j {
            data.swap(i, j);
        }
    }
}
