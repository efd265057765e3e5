//! Concentration constants and error-bound diagnostics.
//!
//! None of these values feed back into the estimator except `A`, which sets
//! the scale of the window-comparison threshold. The rest are reported so
//! that runs can be checked against the guarantees they are supposed to meet.

use serde::{Deserialize, Serialize};

use crate::config::WindowSchedule;
use crate::error::{Error, Result};
use crate::votes::MIN_LABELERS;

/// Multiplier on the accumulated drift in the per-window error bound.
pub const DRIFT_FACTOR: f64 = 12.0;

/// Union-bound constant `A = sqrt(2 ln((2m - 1) n (n - 1) / delta))`.
pub fn compute_a_const(n: usize, m: usize, delta: f64) -> Result<f64> {
    if n < MIN_LABELERS {
        return Err(Error::param("n", format!("need n >= {MIN_LABELERS}, got {n}")));
    }
    if m < 2 {
        return Err(Error::param("m", format!("need m >= 2, got {m}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("delta", format!("must lie in (0, 1), got {delta}")));
    }
    let events = (2 * m - 1) as f64 * (n * (n - 1)) as f64;
    Ok((2.0 * (events / delta).ln()).sqrt())
}

/// Approximation-factor constant
/// `Phi = 1 + max{(2b + 2) / (g_min (1 - g_max)), (2b + 2) / (b (1 - g_max))}`.
pub fn compute_phi(schedule: &WindowSchedule, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("must be positive, got {beta}")));
    }
    let numer = 2.0 * beta + 2.0;
    let slack = 1.0 - schedule.gamma_max();
    let by_ratio = numer / (schedule.gamma_min() * slack);
    let by_beta = numer / (beta * slack);
    Ok(1.0 + by_ratio.max(by_beta))
}

/// Statistical error term `A / sqrt(r)`.
pub fn statistical_term(r: usize, a_const: f64) -> f64 {
    assert!(r >= 1, "window size must be positive");
    a_const / (r as f64).sqrt()
}

/// Right-hand side of the per-window error decomposition:
/// `A / sqrt(r) + 12 * drift`, where `drift` is the summed sup-norm change of
/// the accuracy vector across the window.
pub fn window_error_bound(r: usize, a_const: f64, drift: f64) -> f64 {
    statistical_term(r, a_const) + DRIFT_FACTOR * drift
}

/// Scale factor `(5/2) * Phi / tau^2` that converts the best per-window
/// correlation bound into an accuracy bound.
pub fn accuracy_prefactor(phi: f64, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau <= 0.5) {
        return Err(Error::param("tau", format!("must lie in (0, 1/2], got {tau}")));
    }
    Ok(2.5 * phi / (tau * tau))
}

/// Bound constants for one configuration, as reported by diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticBound {
    pub phi: f64,
    pub a_const: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub accuracy_prefactor: Option<f64>,
    /// `(r, A / sqrt(r))` for every size in the schedule.
    pub bound_per_window: Vec<(usize, f64)>,
}

impl DiagnosticBound {
    pub fn new(
        n: usize,
        schedule: &WindowSchedule,
        beta: f64,
        delta: f64,
        tau: Option<f64>,
    ) -> Result<Self> {
        let a_const = compute_a_const(n, schedule.len(), delta)?;
        let phi = compute_phi(schedule, beta)?;
        let accuracy_prefactor = tau.map(|tau| accuracy_prefactor(phi, tau)).transpose()?;
        let bound_per_window = schedule
            .sizes()
            .iter()
            .map(|&r| (r, statistical_term(r, a_const)))
            .collect();
        Ok(DiagnosticBound {
            phi,
            a_const,
            tau,
            accuracy_prefactor,
            bound_per_window,
        })
    }
}
