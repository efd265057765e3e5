//! Window ladders and estimator configuration.

use serde::{Deserialize, Serialize};

use crate::bounds::compute_a_const;
use crate::error::{Error, Result};
use crate::votes::MIN_LABELERS;

/// Strictly increasing ladder of candidate window sizes `r_1 < ... < r_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct WindowSchedule {
    sizes: Vec<usize>,
    gamma_min: f64,
    gamma_max: f64,
}

impl WindowSchedule {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::param("schedule", "need at least two window sizes"));
        }
        if sizes[0] == 0 {
            return Err(Error::param("schedule", "window sizes must be positive"));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("schedule", "window sizes must be strictly increasing"));
        }
        let ratios = sizes.windows(2).map(|w| (w[0] as f64 / w[1] as f64).sqrt());
        let (gamma_min, gamma_max) = ratios.fold((f64::INFINITY, 0.0_f64), |(lo, hi), g| {
            (lo.min(g), hi.max(g))
        });
        Ok(WindowSchedule {
            sizes,
            gamma_min,
            gamma_max,
        })
    }

    /// `{2^0, 2^1, ..., 2^(m-1)}`.
    pub fn powers_of_two(m: usize) -> Result<Self> {
        if m >= usize::BITS as usize {
            return Err(Error::param("m", format!("{m} doublings overflow")));
        }
        Self::new((0..m).map(|k| 1usize << k).collect())
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn smallest(&self) -> usize {
        self.sizes[0]
    }

    pub fn largest(&self) -> usize {
        self.sizes[self.sizes.len() - 1]
    }

    pub fn contains(&self, r: usize) -> bool {
        self.sizes.binary_search(&r).is_ok()
    }

    /// `min_k sqrt(r_k / r_{k+1})`
    pub fn gamma_min(&self) -> f64 {
        self.gamma_min
    }

    /// `max_k sqrt(r_k / r_{k+1})`
    pub fn gamma_max(&self) -> f64 {
        self.gamma_max
    }
}

impl TryFrom<Vec<usize>> for WindowSchedule {
    type Error = Error;

    fn try_from(sizes: Vec<usize>) -> Result<Self> {
        WindowSchedule::new(sizes)
    }
}

impl From<WindowSchedule> for Vec<usize> {
    fn from(schedule: WindowSchedule) -> Vec<usize> {
        schedule.sizes
    }
}

/// Bounds applied to every estimated accuracy before weighting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClipRange {
    lo: f64,
    hi: f64,
}

impl ClipRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo < 0.5 && hi > 0.5 && hi < 1.0) {
            return Err(Error::param(
                "clip",
                format!("need 0 < lo < 1/2 < hi < 1, got [{lo}, {hi}]"),
            ));
        }
        Ok(ClipRange { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn apply(&self, p: f64) -> f64 {
        p.clamp(self.lo, self.hi)
    }
}

impl Default for ClipRange {
    fn default() -> Self {
        ClipRange { lo: 0.1, hi: 0.9 }
    }
}

pub const DEFAULT_BETA: f64 = 0.1;
pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_M: usize = 20;

/// Parameters of the adaptive estimator. The union-bound constant
/// `A = sqrt(2 ln((2m-1) n (n-1) / delta))` is kept in sync with `n`, `m`
/// and `delta` by every constructor and setter.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveConfig {
    n: usize,
    schedule: WindowSchedule,
    beta: f64,
    delta: f64,
    clip: ClipRange,
    a_const: f64,
}

impl AdaptiveConfig {
    pub fn new(
        n: usize,
        schedule: WindowSchedule,
        beta: f64,
        delta: f64,
        clip: ClipRange,
    ) -> Result<Self> {
        if n < MIN_LABELERS {
            return Err(Error::param("n", format!("need n >= {MIN_LABELERS}, got {n}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param("beta", format!("must be positive, got {beta}")));
        }
        let a_const = compute_a_const(n, schedule.len(), delta)?;
        Ok(AdaptiveConfig {
            n,
            schedule,
            beta,
            delta,
            clip,
            a_const,
        })
    }

    /// `m = 20` powers of two, `beta = delta = 0.1`, clip to `[0.1, 0.9]`.
    pub fn with_defaults(n: usize) -> Result<Self> {
        Self::new(
            n,
            WindowSchedule::powers_of_two(DEFAULT_M)?,
            DEFAULT_BETA,
            DEFAULT_DELTA,
            ClipRange::default(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn schedule(&self) -> &WindowSchedule {
        &self.schedule
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn clip(&self) -> ClipRange {
        self.clip
    }

    pub fn a_const(&self) -> f64 {
        self.a_const
    }

    pub fn set_n(&mut self, n: usize) -> Result<()> {
        *self = Self::new(n, self.schedule.clone(), self.beta, self.delta, self.clip)?;
        Ok(())
    }

    pub fn set_schedule(&mut self, schedule: WindowSchedule) -> Result<()> {
        *self = Self::new(self.n, schedule, self.beta, self.delta, self.clip)?;
        Ok(())
    }

    pub fn set_delta(&mut self, delta: f64) -> Result<()> {
        *self = Self::new(self.n, self.schedule.clone(), self.beta, delta, self.clip)?;
        Ok(())
    }

    pub fn set_beta(&mut self, beta: f64) -> Result<()> {
        *self = Self::new(self.n, self.schedule.clone(), beta, self.delta, self.clip)?;
        Ok(())
    }

    pub fn set_clip(&mut self, clip: ClipRange) {
        self.clip = clip;
    }
}
