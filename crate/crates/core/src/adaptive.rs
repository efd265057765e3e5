//! Window selection by successive comparison of trailing correlation
//! matrices.
//!
//! Starting from the smallest window, the selector doubles up the ladder as
//! long as the matrices for `r_k` and `r_{k+1}` agree to within what sampling
//! noise alone explains. The first disagreement means the extra samples come
//! from a different distribution, and the search stops at `r_k`.

use serde::{Deserialize, Serialize};

use crate::config::AdaptiveConfig;
use crate::corrwin::WindowedCorrelationBank;
use crate::error::{Error, Result};

/// Why the search stopped where it did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The gap between `r_k` and `r_{k+1}` exceeded the threshold.
    ThresholdExceeded,
    /// Every comparison passed; the largest window was chosen.
    ScheduleExhausted,
    /// The next window would reach before the first observation.
    HorizonReached,
}

/// One comparison performed during the search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapTest {
    pub index: usize,
    pub r: usize,
    pub r_next: usize,
    pub gap: f64,
    pub threshold: f64,
}

impl GapTest {
    pub fn passed(&self) -> bool {
        self.gap <= self.threshold
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowDecision {
    /// Zero-based index into the schedule.
    pub chosen_index: usize,
    pub chosen_r: usize,
    pub stop_reason: StopReason,
    pub gaps: Vec<GapTest>,
}

/// `A * (2 beta / sqrt(r) + sqrt((1 - r / r_next) / r))`.
pub fn threshold_value(a_const: f64, beta: f64, r: usize, r_next: usize) -> f64 {
    let r_f = r as f64;
    let shrink = 1.0 - r_f / r_next as f64;
    a_const * (2.0 * beta / r_f.sqrt() + (shrink / r_f).sqrt())
}

/// Threshold for the comparison between schedule entries `k` and `k + 1`
/// (zero-based `k`, so `0 <= k <= m - 2`).
pub fn threshold(k: usize, config: &AdaptiveConfig) -> Result<f64> {
    let sizes = config.schedule().sizes();
    if k + 1 >= sizes.len() {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: sizes.len() - 1,
        });
    }
    Ok(threshold_value(
        config.a_const(),
        config.beta(),
        sizes[k],
        sizes[k + 1],
    ))
}

/// Picks the window to estimate from at the bank's current step.
///
/// The bank must track every size in `config`'s schedule.
pub fn select_window(
    bank: &WindowedCorrelationBank,
    config: &AdaptiveConfig,
) -> Result<WindowDecision> {
    let sizes = config.schedule().sizes();
    let t = bank.t();
    if t < sizes[0] as u64 {
        return Err(Error::TooEarly { t, r_min: sizes[0] });
    }
    let mut k = 0;
    let mut gaps = Vec::new();
    let stop_reason = loop {
        if k + 1 >= sizes.len() {
            break StopReason::ScheduleExhausted;
        }
        if sizes[k + 1] as u64 > t {
            break StopReason::HorizonReached;
        }
        let test = GapTest {
            index: k,
            r: sizes[k],
            r_next: sizes[k + 1],
            gap: bank.gap(sizes[k], sizes[k + 1])?,
            threshold: threshold(k, config)?,
        };
        let passed = test.passed();
        gaps.push(test);
        if !passed {
            break StopReason::ThresholdExceeded;
        }
        k += 1;
    };
    Ok(WindowDecision {
        chosen_index: k,
        chosen_r: sizes[k],
        stop_reason,
        gaps,
    })
}
