//! Uniform transforms with the normalisation
//! `f(x) = sum_{n=0}^{N-1} c_n e^{inx}`, `c_n = (1/N) sum_k f_k e^{-inx_k}`,
//! and the end-to-end non-uniform pipelines built on [`FfiaPlan`].

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{check_len, FfiaError, Result};
use crate::ffia::{configuration_hash, Direction, FfiaPlan, InverseCoeffs};
use crate::fft::{fft_in_place, Sign};
use crate::partition::reduce_angle;
use crate::policy::LevelPolicy;
use crate::special::TruncationParams;

fn check_power_of_two(n: usize) -> Result<()> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(FfiaError::InvalidArgument(format!(
            "length {n} is not a power of two"
        )))
    }
}

/// Fourier coefficients `c_0..c_{N-1}`; frequencies are `0..N`, not
/// symmetric about zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<Complex64>);

impl Spectrum {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        check_power_of_two(coeffs.len())?;
        Ok(Self(coeffs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }
}

/// Samples `f_k = f(2 pi k / N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformSamples(Vec<Complex64>);

impl UniformSamples {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        check_power_of_two(samples.len())?;
        Ok(Self(samples))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }
}

/// `{f_k} -> {c_n}`, carrying the `1/N`.
pub fn dft_forward(f: &UniformSamples) -> Spectrum {
    let mut data = f.0.clone();
    fft_in_place(&mut data, Sign::Negative).expect("length checked on construction");
    let scale = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    Spectrum(data)
}

/// `{c_n} -> {f_k}`.
pub fn dft_inverse(c: &Spectrum) -> UniformSamples {
    let mut data = c.0.clone();
    fft_in_place(&mut data, Sign::Positive).expect("length checked on construction");
    UniformSamples(data)
}

/// Reusable spectrum-to-points transform: the plan is the "data structure"
/// and is built once per point set.
#[derive(Debug, Clone)]
pub struct Nufft {
    plan: Arc<FfiaPlan>,
}

impl Nufft {
    pub fn new(n: usize, y: &[f64], eps: f64, policy: &dyn LevelPolicy) -> Result<Self> {
        check_power_of_two(n)?;
        let params = TruncationParams::plan(eps, n, y.len(), policy)?;
        Ok(Self {
            plan: Arc::new(FfiaPlan::forward(n, y, params)?),
        })
    }

    pub fn from_plan(plan: Arc<FfiaPlan>) -> Result<Self> {
        if plan.direction() != Direction::Forward {
            return Err(FfiaError::InvalidArgument(
                "NUFFT needs a forward plan".into(),
            ));
        }
        Ok(Self { plan })
    }

    pub fn plan(&self) -> &FfiaPlan {
        &self.plan
    }

    /// `g_j = sum_n c_n e^{i n y_j}`.
    pub fn apply(&self, c: &Spectrum) -> Result<Vec<Complex64>> {
        check_len("spectrum", self.plan.grid_size(), c.len())?;
        self.plan.forward_apply(dft_inverse(c).as_slice())
    }
}

/// Reusable points-to-spectrum transform for `M = N` points.
#[derive(Debug, Clone)]
pub struct Inufft {
    plan: Arc<FfiaPlan>,
    coeffs: Arc<InverseCoeffs>,
}

impl Inufft {
    pub fn new(y: &[f64], eps: f64, policy: &dyn LevelPolicy) -> Result<Self> {
        let n = y.len();
        check_power_of_two(n)?;
        let params = TruncationParams::plan(eps, n, n, policy)?;
        let plan = FfiaPlan::inverse(y, params)?;
        let coeffs = InverseCoeffs::precompute(y)?;
        Ok(Self {
            plan: Arc::new(plan),
            coeffs: Arc::new(coeffs),
        })
    }

    pub fn plan(&self) -> &FfiaPlan {
        &self.plan
    }

    pub fn coeffs(&self) -> &InverseCoeffs {
        &self.coeffs
    }

    pub fn apply(&self, g: &[Complex64]) -> Result<Spectrum> {
        let f = self.plan.inverse_apply(&self.coeffs, g)?;
        Ok(dft_forward(&UniformSamples(f)))
    }
}

/// One-shot spectrum to scattered points.
pub fn nufft(
    c: &Spectrum,
    y: &[f64],
    eps: f64,
    policy: &dyn LevelPolicy,
) -> Result<Vec<Complex64>> {
    Nufft::new(c.len(), y, eps, policy)?.apply(c)
}

/// One-shot scattered samples to spectrum.
pub fn inufft(g: &[Complex64], y: &[f64], eps: f64, policy: &dyn LevelPolicy) -> Result<Spectrum> {
    check_len("samples", y.len(), g.len())?;
    Inufft::new(y, eps, policy)?.apply(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct PlanKey {
    points: u64,
    eps_bits: u64,
    n: usize,
    direction: Direction,
    policy: String,
}

/// Forward plans keyed on (point-set hash, eps, N, policy).
#[derive(Debug, Default)]
pub struct PlanCache {
    plans: Mutex<HashMap<PlanKey, Arc<FfiaPlan>>>,
}

impl PlanCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn forward(
        &self,
        n: usize,
        y: &[f64],
        eps: f64,
        policy: &dyn LevelPolicy,
    ) -> Result<Arc<FfiaPlan>> {
        let reduced: Vec<f64> = y.iter().map(|&v| reduce_angle(v)).collect();
        let key = PlanKey {
            points: configuration_hash(n, &reduced),
            eps_bits: eps.to_bits(),
            n,
            direction: Direction::Forward,
            policy: policy.name(),
        };
        if let Some(plan) = self.plans.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(plan));
        }
        let params = TruncationParams::plan(eps, n, y.len(), policy)?;
        let plan = Arc::new(FfiaPlan::forward(n, &reduced, params)?);
        self.plans
            .lock()
            .expect("cache lock")
            .insert(key, Arc::clone(&plan));
        Ok(plan)
    }

    pub fn len(&self) -> usize {
        self.plans.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
