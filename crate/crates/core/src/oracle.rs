//! Dense `O(NM)` reference transforms, used as ground truth and as the
//! "straightforward method" in benchmarks.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, Result};
use crate::ffia::{uniform_grid, InverseCoeffs};
use crate::partition::{reduce_angle, wrap_displacement};
use crate::special::{grid_point, kernel_g, modulation_f, SINGULARITY_TOLERANCE};

/// `g_j = sum_k F_j G(y_j - x_k) f_k`; a target on a grid node takes that
/// node's value (the `K_jk -> 1` limit).
pub fn direct_forward(f: &[Complex64], y: &[f64]) -> Result<Vec<Complex64>> {
    let n = f.len();
    let grid = uniform_grid(n);
    y.par_iter()
        .map(|&yj| {
            let yj = reduce_angle(yj);
            let nearest = (yj * n as f64 / std::f64::consts::TAU).round() as usize % n;
            if wrap_displacement(yj, grid_point(nearest, n)).abs() < SINGULARITY_TOLERANCE {
                return Ok(f[nearest]);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (&xk, fk) in grid.iter().zip(f) {
                acc += kernel_g(yj - xk)? * fk;
            }
            Ok(modulation_f(yj, n) * acc)
        })
        .collect()
}

/// `f_k = sum_j C_k G(x_k - y_j) D_j g_j`, with each `C_k D_j` formed in log
/// space before exponentiation.
pub fn direct_inverse(
    g: &[Complex64],
    y: &[f64],
    coeffs: &InverseCoeffs,
) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    check_len("scattered samples", n, g.len())?;
    check_len("points", n, y.len())?;
    let y: Vec<f64> = y.iter().map(|&v| reduce_angle(v)).collect();
    let grid = uniform_grid(n);
    grid.par_iter()
        .zip(coeffs.c())
        .map(|(&xk, ck)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&yj, dj), gj) in y.iter().zip(coeffs.d()).zip(g) {
                acc += (*ck * *dj).to_complex() * kernel_g(xk - yj)? * gj;
            }
            Ok(acc)
        })
        .collect()
}
