//! Incrementally maintained empirical correlation matrices over a ladder of
//! trailing windows.
//!
//! All windows share one ring buffer holding the most recent `r_max` vote
//! vectors. Each window keeps the integer sums of pairwise vote products over
//! its last `min(t, r)` steps, so a push costs `O(windows * n^2)` and the
//! materialized matrices are exact ratios of integers.

use std::collections::VecDeque;
use std::ops::Index;

use crate::config::WindowSchedule;
use crate::error::{Error, Result};
use crate::votes::{VoteVector, MIN_LABELERS};

/// Dense `n x n` matrix of pairwise vote correlations.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    data: Vec<f64>,
    samples: Option<usize>,
}

impl CorrelationMatrix {
    /// Builds a matrix from row-major entries. No structural checks are made
    /// here; consumers validate what they need.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                actual: data.len(),
            });
        }
        Ok(CorrelationMatrix {
            n,
            data,
            samples: None,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(n, data)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of vote vectors the matrix was averaged over, when it came
    /// from a window.
    pub fn samples(&self) -> Option<usize> {
        self.samples
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
    }

    pub fn as_row_major(&self) -> &[f64] {
        &self.data
    }

    /// Largest absolute entrywise difference.
    pub fn sup_distance(&self, other: &CorrelationMatrix) -> f64 {
        assert_eq!(self.n, other.n, "matrix dimensions differ");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CorrelationMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

/// Ring of recent vote vectors plus per-window product sums.
#[derive(Clone, Debug)]
pub struct WindowedCorrelationBank {
    n: usize,
    windows: Vec<usize>,
    // flattened vote vectors, oldest first
    ring: VecDeque<i8>,
    sums: Vec<Vec<i64>>,
    t: u64,
}

impl WindowedCorrelationBank {
    /// Bank tracking an arbitrary strictly increasing set of window sizes.
    pub fn new(n: usize, windows: &[usize]) -> Result<Self> {
        if n < MIN_LABELERS {
            return Err(Error::param("n", format!("need n >= {MIN_LABELERS}, got {n}")));
        }
        if windows.is_empty() || windows[0] == 0 || windows.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param(
                "windows",
                "need a nonempty strictly increasing list of positive sizes",
            ));
        }
        Ok(WindowedCorrelationBank {
            n,
            windows: windows.to_vec(),
            ring: VecDeque::new(),
            sums: vec![vec![0; n * n]; windows.len()],
            t: 0,
        })
    }

    pub fn for_schedule(n: usize, schedule: &WindowSchedule) -> Result<Self> {
        Self::new(n, schedule.sizes())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Steps observed so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn windows(&self) -> &[usize] {
        &self.windows
    }

    /// Maximum number of vote vectors ever retained (the largest window).
    pub fn capacity(&self) -> usize {
        self.windows[self.windows.len() - 1]
    }

    /// Number of vote vectors currently held in the ring.
    pub fn retained(&self) -> usize {
        self.ring.len() / self.n
    }

    /// Effective length of window `r`: `min(t, r)`.
    pub fn window_len(&self, r: usize) -> usize {
        r.min(self.retained())
    }

    pub fn push(&mut self, votes: &VoteVector) -> Result<()> {
        let n = self.n;
        if votes.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: votes.len(),
            });
        }
        let incoming = votes.as_slice();
        let retained = self.retained();
        for (sums, &r) in self.sums.iter_mut().zip(&self.windows) {
            if retained >= r {
                let start = (retained - r) * n;
                for i in 0..n {
                    let vi = self.ring[start + i] as i64;
                    for j in 0..n {
                        sums[i * n + j] -= vi * self.ring[start + j] as i64;
                    }
                }
            }
            for i in 0..n {
                let vi = incoming[i] as i64;
                for j in 0..n {
                    sums[i * n + j] += vi * incoming[j] as i64;
                }
            }
        }
        if retained == self.capacity() {
            self.ring.drain(..n);
        }
        self.ring.extend(incoming.iter().copied());
        self.t += 1;
        Ok(())
    }

    fn slot(&self, r: usize) -> Result<usize> {
        self.windows
            .binary_search(&r)
            .map_err(|_| Error::UnknownWindow(r))
    }

    /// Integer sums `sum_k v_i(k) v_j(k)` over the last `min(t, r)` steps,
    /// row-major.
    pub fn sums(&self, r: usize) -> Result<&[i64]> {
        Ok(&self.sums[self.slot(r)?])
    }

    /// Empirical correlation over the last `min(t, r)` steps.
    pub fn correlation(&self, r: usize) -> Result<CorrelationMatrix> {
        let slot = self.slot(r)?;
        if self.t == 0 {
            return Err(Error::Empty);
        }
        let len = self.window_len(r);
        let denom = len as f64;
        let data = self.sums[slot].iter().map(|&s| s as f64 / denom).collect();
        Ok(CorrelationMatrix {
            n: self.n,
            data,
            samples: Some(len),
        })
    }

    /// Sup-norm distance between the materialized matrices of two tracked
    /// windows, computed from cross-multiplied integer sums so the only
    /// rounding is the final division.
    pub fn gap(&self, r_a: usize, r_b: usize) -> Result<f64> {
        self.gap_impl(r_a, r_b, true)
    }

    /// Same as [`gap`](Self::gap) restricted to off-diagonal entries.
    pub fn gap_off_diagonal(&self, r_a: usize, r_b: usize) -> Result<f64> {
        self.gap_impl(r_a, r_b, false)
    }

    fn gap_impl(&self, r_a: usize, r_b: usize, include_diagonal: bool) -> Result<f64> {
        let (sa, sb) = (self.slot(r_a)?, self.slot(r_b)?);
        if self.t == 0 {
            return Err(Error::Empty);
        }
        let (la, lb) = (self.window_len(r_a) as i64, self.window_len(r_b) as i64);
        let n = self.n;
        let mut worst = 0i64;
        for i in 0..n {
            for j in 0..n {
                if i == j && !include_diagonal {
                    continue;
                }
                let cross = self.sums[sa][i * n + j] * lb - self.sums[sb][i * n + j] * la;
                worst = worst.max(cross.abs());
            }
        }
        Ok(worst as f64 / (la as f64 * lb as f64))
    }

    /// Copies of the retained vote vectors, oldest first.
    pub fn retained_votes(&self) -> Vec<Vec<i8>> {
        let flat: Vec<i8> = self.ring.iter().copied().collect();
        flat.chunks(self.n).map(<[i8]>::to_vec).collect()
    }
}
