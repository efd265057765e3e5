//! Accuracy recovery from pairwise correlations.
//!
//! Under conditional independence `C_ij = (2p_i - 1)(2p_j - 1)` for `i != j`,
//! so for any two other labelers `i, j` we have
//! `(2p_h - 1)^2 = C_ih C_hj / C_ij`. Each labeler is scored from the pair
//! with the largest `|C_ij|`, which keeps the division well conditioned.

use serde::{Deserialize, Serialize};

use crate::config::ClipRange;
use crate::corrwin::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::votes::MIN_LABELERS;

/// Pair correlations smaller than this are treated as exactly zero.
pub const ZERO_CORRELATION: f64 = 1e-15;

const STRUCTURE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccuracyEstimate {
    /// Clipped accuracies.
    pub p_hat: Vec<f64>,
    /// Accuracies before clipping; may exceed 1.
    pub raw_p: Vec<f64>,
    /// Samples behind the correlation matrix, when known.
    pub window_used: Option<usize>,
}

/// Recovers per-labeler accuracies from a symmetric unit-diagonal matrix and
/// clips them into `clip`.
pub fn recover_accuracies(c: &CorrelationMatrix, clip: ClipRange) -> Result<AccuracyEstimate> {
    let n = c.n();
    if n < MIN_LABELERS {
        return Err(Error::param("n", format!("need n >= {MIN_LABELERS}, got {n}")));
    }
    for i in 0..n {
        if (c[(i, i)] - 1.0).abs() > STRUCTURE_TOLERANCE {
            return Err(Error::MalformedCorrelation { row: i, col: i });
        }
        for j in i + 1..n {
            if (c[(i, j)] - c[(j, i)]).abs() > STRUCTURE_TOLERANCE {
                return Err(Error::MalformedCorrelation { row: i, col: j });
            }
        }
    }

    let raw_p: Vec<f64> = (0..n).map(|h| score_labeler(c, h)).collect();
    let p_hat = raw_p.iter().map(|&p| clip.apply(p)).collect();
    Ok(AccuracyEstimate {
        p_hat,
        raw_p,
        window_used: c.samples(),
    })
}

fn score_labeler(c: &CorrelationMatrix, h: usize) -> f64 {
    let n = c.n();
    let mut best: Option<(usize, usize, f64)> = None;
    for i in (0..n).filter(|&i| i != h) {
        for j in (i + 1..n).filter(|&j| j != h) {
            let mag = c[(i, j)].abs();
            if best.is_none_or(|(_, _, b)| mag > b) {
                best = Some((i, j, mag));
            }
        }
    }
    let (i, j, mag) = best.expect("n >= 3 leaves at least one pair");
    if mag < ZERO_CORRELATION {
        return 0.5;
    }
    (1.0 + (c[(i, h)] * c[(h, j)] / c[(i, j)]).abs().sqrt()) / 2.0
}

/// Population correlation matrix of conditionally independent labelers with
/// accuracies `p`.
pub fn exact_correlation_from_p(p: &[f64]) -> Result<CorrelationMatrix> {
    if let Some(&bad) = p.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        return Err(Error::param("p", format!("accuracy {bad} outside [0, 1]")));
    }
    let n = p.len();
    let bias: Vec<f64> = p.iter().map(|&x| 2.0 * x - 1.0).collect();
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            data.push(if i == j { 1.0 } else { bias[i] * bias[j] });
        }
    }
    CorrelationMatrix::from_row_major(n, data)
}
