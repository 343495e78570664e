//! Fast multipole accelerated interpolation between uniform and non-uniform
//! samples of band-limited `2pi`-periodic functions, and the non-uniform FFT
//! and inverse FFT built on it.
//!
//! The forward kernel factors as `K_jk = F(y_j) G(y_j - x_k)` and the inverse
//! kernel as `L_kj = C_k G(x_k - y_j) D_j`, with `G(t) = 1 / (e^{it} - 1)`.
//! Both reduce to a cotangent sum, evaluated with a level-2 Bernoulli
//! series split and a periodic multilevel FMM for the `1/t` singularity.
//!
//! ```
//! use ffia::{nufft, EmpiricalPolicy, Spectrum};
//! use num_complex::Complex64;
//!
//! let mut c = vec![Complex64::new(0.0, 0.0); 64];
//! c[1] = Complex64::new(1.0, 0.0);
//! let y = [0.25, 1.5, 4.0];
//! let g = nufft(&Spectrum::new(c).unwrap(), &y, 1e-10, &EmpiricalPolicy::default()).unwrap();
//! for (gj, yj) in g.iter().zip(y) {
//!     assert!((gj - Complex64::from_polar(1.0, yj)).norm() < 1e-10);
//! }
//! ```

pub mod error;
pub mod ffia;
pub mod fft;
pub mod mlfmm;
pub mod oracle;
pub mod partition;
pub mod policy;
pub mod special;
pub mod transforms;

pub use error::{FfiaError, Result};
pub use ffia::{Direction, FfiaPlan, InverseCoeffs, LogComplex, RegularPart};
pub use partition::{wrap_displacement, CircleTree, Level2Assignment};
pub use policy::{CostModelPolicy, EmpiricalPolicy, FixedLevel, LevelPolicy, PolicyRegistry};
pub use special::{BernoulliRatioTable, CostModel, TruncationParams};
pub use transforms::{
    dft_forward, dft_inverse, inufft, nufft, Inufft, Nufft, PlanCache, Spectrum, UniformSamples,
};
