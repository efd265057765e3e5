//! Synthetic drifting streams, abstention resolution and identity-shuffle
//! drift.
//!
//! Every source of randomness draws from its own ChaCha stream derived from
//! one master seed, so e.g. enabling shuffle drift leaves the underlying
//! truths and votes untouched.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::DRIFT_FACTOR;
use crate::error::{Error, Result};
use crate::ingest::StreamRecord;
use crate::votes::{Label, RawVoteVector, VoteVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RngRole {
    Truth = 0,
    Votes = 1,
    Abstentions = 2,
    Permutation = 3,
}

pub fn role_rng(seed: u64, role: RngRole) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(role as u64);
    rng
}

/// A stretch of steps with constant labeler accuracies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub length: usize,
    pub accuracies: Vec<f64>,
}

impl FromStr for BlockSpec {
    type Err = Error;

    /// `LEN:p1,p2,...`
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("blocks", format!("expected LEN:p1,p2,..., got {s:?}"));
        let (len, ps) = s.split_once(':').ok_or_else(bad)?;
        let length = len.trim().parse().map_err(|_| bad())?;
        let accuracies = ps
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockSpec { length, accuracies })
    }
}

/// Parses `;`-separated block specs.
pub fn parse_blocks(s: &str) -> Result<Vec<BlockSpec>> {
    s.split(';').filter(|b| !b.trim().is_empty()).map(str::parse).collect()
}

/// Block length used by the reference three-block scenario.
pub const PAPER_BLOCK_LEN: usize = 5000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticStreamConfig {
    pub blocks: Vec<BlockSpec>,
    pub seed: u64,
    pub n: usize,
}

impl SyntheticStreamConfig {
    pub fn new(blocks: Vec<BlockSpec>, seed: u64) -> Result<Self> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::param("blocks", "need at least one block"))?;
        let n = first.accuracies.len();
        for b in &blocks {
            if b.accuracies.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: b.accuracies.len(),
                });
            }
            if let Some(&p) = b.accuracies.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(Error::param("blocks", format!("accuracy {p} outside [0, 1]")));
            }
            if b.length == 0 {
                return Err(Error::param("blocks", "empty block"));
            }
        }
        Ok(SyntheticStreamConfig { blocks, seed, n })
    }

    /// Three labelers over blocks of length `T, 2T, T`; two labelers are
    /// 0.9-accurate and the 0.6-accurate one changes at every boundary.
    pub fn paper_preset(block_len: usize, seed: u64) -> Result<Self> {
        let block = |length, accuracies: [f64; 3]| BlockSpec {
            length,
            accuracies: accuracies.to_vec(),
        };
        Self::new(
            vec![
                block(block_len, [0.9, 0.9, 0.6]),
                block(2 * block_len, [0.9, 0.6, 0.9]),
                block(block_len, [0.6, 0.9, 0.9]),
            ],
            seed,
        )
    }

    pub fn total_len(&self) -> usize {
        self.blocks.iter().map(|b| b.length).sum()
    }

    /// Steps at which a new block starts (one-based), excluding step 1.
    pub fn boundaries(&self) -> Vec<u64> {
        let mut start = 0u64;
        let mut out = Vec::new();
        for b in &self.blocks[..self.blocks.len() - 1] {
            start += b.length as u64;
            out.push(start + 1);
        }
        out
    }

    /// Block index covering one-based step `t`.
    pub fn block_at(&self, t: u64) -> Option<usize> {
        if t == 0 {
            return None;
        }
        let mut end = 0u64;
        for (i, b) in self.blocks.iter().enumerate() {
            end += b.length as u64;
            if t <= end {
                return Some(i);
            }
        }
        None
    }

    pub fn accuracy_at(&self, t: u64) -> Option<&[f64]> {
        self.block_at(t).map(|i| self.blocks[i].accuracies.as_slice())
    }
}

/// One generated or ingested step.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamStep {
    pub raw: RawVoteVector,
    pub truth: Option<Label>,
    pub block_id: Option<usize>,
}

impl StreamStep {
    pub fn to_record(&self, t: u64) -> StreamRecord {
        StreamRecord {
            votes: self.raw.clone(),
            label: self.truth,
            t: Some(t),
        }
    }
}

impl From<StreamRecord> for StreamStep {
    fn from(rec: StreamRecord) -> Self {
        StreamStep {
            raw: rec.votes,
            truth: rec.label,
            block_id: None,
        }
    }
}

/// Draws a uniform truth per step and lets each labeler independently agree
/// with it with its block accuracy.
pub fn generate_synthetic(config: &SyntheticStreamConfig) -> Vec<StreamStep> {
    let mut truth_rng = role_rng(config.seed, RngRole::Truth);
    let mut vote_rng = role_rng(config.seed, RngRole::Votes);
    let mut steps = Vec::with_capacity(config.total_len());
    for (block_id, block) in config.blocks.iter().enumerate() {
        for _ in 0..block.length {
            let truth = if truth_rng.gen_bool(0.5) {
                Label::Positive
            } else {
                Label::Negative
            };
            let y = truth.sign();
            let votes = block
                .accuracies
                .iter()
                .map(|&p| if vote_rng.gen_bool(p) { y } else { -y })
                .collect();
            steps.push(StreamStep {
                raw: RawVoteVector::new(votes).expect("generated votes are valid"),
                truth: Some(truth),
                block_id: Some(block_id),
            });
        }
    }
    steps
}

/// Replaces each abstention with an independent fair `+-1` draw.
pub fn resolve_abstentions<R: Rng>(raw: &RawVoteVector, rng: &mut R) -> Result<VoteVector> {
    let votes = raw
        .as_slice()
        .iter()
        .map(|&v| match v {
            0 => {
                if rng.gen_bool(0.5) {
                    1
                } else {
                    -1
                }
            }
            other => other,
        })
        .collect();
    VoteVector::new(votes)
}

/// Seeded abstention resolution over a whole stream.
#[derive(Clone, Debug)]
pub struct AbstentionResolver {
    rng: ChaCha8Rng,
}

impl AbstentionResolver {
    pub fn new(seed: u64) -> Self {
        AbstentionResolver {
            rng: role_rng(seed, RngRole::Abstentions),
        }
    }

    pub fn resolve(&mut self, raw: &RawVoteVector) -> Result<VoteVector> {
        resolve_abstentions(raw, &mut self.rng)
    }
}

/// Resolves a stream into `(votes, truth)` pairs ready for a strategy run.
pub fn resolve_stream(steps: &[StreamStep], seed: u64) -> Result<Vec<(VoteVector, Option<Label>)>> {
    let mut resolver = AbstentionResolver::new(seed);
    steps
        .iter()
        .map(|s| Ok((resolver.resolve(&s.raw)?, s.truth)))
        .collect()
}

/// Shuffles labeler identities: at each step, with probability `prob`, the
/// current permutation is replaced by a fresh uniform one, and votes are
/// emitted in permuted order (`out[i] = in[perm[i]]`).
#[derive(Clone, Debug)]
pub struct PermuteDrift {
    prob: f64,
    rng: ChaCha8Rng,
    perm: Vec<usize>,
    events: Vec<u64>,
    t: u64,
}

impl PermuteDrift {
    pub fn new(n: usize, prob: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&prob) {
            return Err(Error::param("permute_prob", format!("must lie in [0, 1], got {prob}")));
        }
        Ok(PermuteDrift {
            prob,
            rng: role_rng(seed, RngRole::Permutation),
            perm: (0..n).collect(),
            events: Vec::new(),
            t: 0,
        })
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Steps (one-based) at which a reshuffle happened.
    pub fn events(&self) -> &[u64] {
        &self.events
    }

    pub fn apply(&mut self, step: &StreamStep) -> Result<StreamStep> {
        let raw = step.raw.as_slice();
        if raw.len() != self.perm.len() {
            return Err(Error::DimensionMismatch {
                expected: self.perm.len(),
                actual: raw.len(),
            });
        }
        self.t += 1;
        if self.rng.gen_bool(self.prob) {
            self.perm.shuffle(&mut self.rng);
            self.events.push(self.t);
        }
        let votes = self.perm.iter().map(|&src| raw[src]).collect();
        Ok(StreamStep {
            raw: RawVoteVector::new(votes)?,
            truth: step.truth,
            block_id: step.block_id,
        })
    }

    /// Accuracies as seen after the current permutation.
    pub fn permute_accuracies(&self, p: &[f64]) -> Vec<f64> {
        self.perm.iter().map(|&src| p[src]).collect()
    }
}

pub fn apply_permute_drift(steps: &[StreamStep], prob: f64, seed: u64) -> Result<Vec<StreamStep>> {
    let Some(first) = steps.first() else {
        return Ok(Vec::new());
    };
    let mut drift = PermuteDrift::new(first.raw.len(), prob, seed)?;
    steps.iter().map(|s| drift.apply(s)).collect()
}

/// Ground-truth drift across a trailing window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftTerm {
    /// `sum_{k=t-r+1}^{t-1} ||p(k) - p(k+1)||_inf`
    pub drift: f64,
    /// `12 * drift`, the drift part of the per-window error bound.
    pub bound_term: f64,
}

pub fn true_drift_error(config: &SyntheticStreamConfig, r: usize, t: u64) -> Result<DriftTerm> {
    if r == 0 {
        return Err(Error::param("r", "window size must be positive"));
    }
    config.accuracy_at(t).ok_or(Error::UnknownAccuracy(t))?;
    let first = t.saturating_sub(r as u64 - 1).max(1);
    let mut drift = 0.0;
    for k in first..t {
        let (a, b) = (config.accuracy_at(k).unwrap(), config.accuracy_at(k + 1).unwrap());
        drift += a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    }
    Ok(DriftTerm {
        drift,
        bound_term: DRIFT_FACTOR * drift,
    })
}
