//! Weighted voting and the strategies that produce weights step by step.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adaptive::select_window;
use crate::config::AdaptiveConfig;
use crate::corrwin::WindowedCorrelationBank;
use crate::error::{Error, Result};
use crate::ingest::StepReport;
use crate::triplet::{recover_accuracies, AccuracyEstimate};
use crate::votes::{Label, VoteVector};

/// Log-odds vote weights `ln(p / (1 - p))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    pub fn uniform(n: usize) -> Self {
        WeightVector(vec![1.0; n])
    }

    pub fn from_probabilities(p: &[f64]) -> Result<Self> {
        p.iter()
            .map(|&pi| {
                if pi > 0.0 && pi < 1.0 {
                    Ok((pi / (1.0 - pi)).ln())
                } else {
                    Err(Error::param("p_hat", format!("accuracy {pi} outside (0, 1)")))
                }
            })
            .collect::<Result<Vec<_>>>()
            .map(WeightVector)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn weights_from_accuracies(estimate: &AccuracyEstimate) -> Result<WeightVector> {
    WeightVector::from_probabilities(&estimate.p_hat)
}

/// `sign(sum_i w_i v_i)`, with an exact tie predicting `+1`.
///
/// Positive and negative contributions are summed separately and compared,
/// so equal weights on a split vote tie exactly.
pub fn predict(votes: &VoteVector, weights: &WeightVector) -> Result<Label> {
    if votes.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            actual: votes.len(),
        });
    }
    let (mut pos, mut neg) = (0.0, 0.0);
    for (v, &w) in votes.iter().zip(weights.as_slice()) {
        let c = w * v as f64;
        if c > 0.0 {
            pos += c;
        } else {
            neg -= c;
        }
    }
    Ok(if pos >= neg { Label::Positive } else { Label::Negative })
}

/// Unweighted vote; ties go to `+1`.
pub fn majority_vote(votes: &VoteVector) -> Label {
    let sum: i64 = votes.iter().map(i64::from).sum();
    if sum >= 0 {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// How each step's weights are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Strategy {
    /// Window chosen per step by the adaptive selector.
    Adaptive,
    /// Always the trailing `min(t, r)` steps.
    Fixed(usize),
    /// Equal weights, no estimation.
    Majority,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::Adaptive => f.write_str("adaptive"),
            Strategy::Fixed(r) => write!(f, "fixed:{r}"),
            Strategy::Majority => f.write_str("majority"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adaptive" => Ok(Strategy::Adaptive),
            "majority" => Ok(Strategy::Majority),
            _ => {
                let r = s
                    .strip_prefix("fixed:")
                    .and_then(|r| r.parse::<usize>().ok())
                    .ok_or_else(|| {
                        Error::param("strategy", format!("expected adaptive, majority or fixed:R, got {s:?}"))
                    })?;
                Ok(Strategy::Fixed(r))
            }
        }
    }
}

impl TryFrom<String> for Strategy {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Strategy> for String {
    fn from(s: Strategy) -> String {
        s.to_string()
    }
}

/// Sequential state machine running one strategy over one stream.
#[derive(Clone, Debug)]
pub struct StrategyRunner {
    strategy: Strategy,
    config: AdaptiveConfig,
    bank: Option<WindowedCorrelationBank>,
    t: u64,
}

impl StrategyRunner {
    pub fn new(strategy: Strategy, config: &AdaptiveConfig) -> Result<Self> {
        let n = config.n();
        let bank = match strategy {
            Strategy::Adaptive => Some(WindowedCorrelationBank::for_schedule(n, config.schedule())?),
            Strategy::Fixed(r) => {
                let r_max = config.schedule().largest();
                if r == 0 || r > r_max {
                    return Err(Error::param(
                        "strategy",
                        format!("fixed window {r} must lie in [1, {r_max}]"),
                    ));
                }
                Some(WindowedCorrelationBank::new(n, &[r])?)
            }
            Strategy::Majority => None,
        };
        Ok(StrategyRunner {
            strategy,
            config: config.clone(),
            bank,
            t: 0,
        })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn bank(&self) -> Option<&WindowedCorrelationBank> {
        self.bank.as_ref()
    }

    pub fn step(&mut self, votes: &VoteVector, truth: Option<Label>) -> Result<StepReport> {
        let n = self.config.n();
        if votes.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: votes.len(),
            });
        }
        self.t += 1;
        let (window, estimate, stop_reason) = match (&mut self.bank, self.strategy) {
            (Some(bank), Strategy::Adaptive) => {
                bank.push(votes)?;
                let decision = select_window(bank, &self.config)?;
                let c = bank.correlation(decision.chosen_r)?;
                let est = recover_accuracies(&c, self.config.clip())?;
                (Some(bank.window_len(decision.chosen_r)), Some(est), Some(decision.stop_reason))
            }
            (Some(bank), Strategy::Fixed(r)) => {
                bank.push(votes)?;
                let est = recover_accuracies(&bank.correlation(r)?, self.config.clip())?;
                (Some(bank.window_len(r)), Some(est), None)
            }
            _ => (None, None, None),
        };
        let (weights, prediction) = match &estimate {
            Some(est) => {
                let w = weights_from_accuracies(est)?;
                let label = predict(votes, &w)?;
                (w, label)
            }
            None => (WeightVector::uniform(n), majority_vote(votes)),
        };
        Ok(StepReport {
            t: self.t,
            window,
            p_hat: estimate.map(|e| e.p_hat),
            weights: weights.0,
            prediction,
            truth,
            correct: truth.map(|y| y == prediction),
            stop_reason,
        })
    }
}

/// Runs `strategy` over a whole stream of resolved votes and optional truths.
pub fn run_strategy<I>(stream: I, strategy: Strategy, config: &AdaptiveConfig) -> Result<Vec<StepReport>>
where
    I: IntoIterator<Item = (VoteVector, Option<Label>)>,
{
    let mut runner = StrategyRunner::new(strategy, config)?;
    let reports = stream
        .into_iter()
        .map(|(votes, truth)| runner.step(&votes, truth))
        .collect::<Result<Vec<_>>>()?;
    if reports.is_empty() {
        return Err(Error::Empty);
    }
    Ok(reports)
}
