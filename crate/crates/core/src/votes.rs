//! Vote vectors and binary labels.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest number of labelers the estimator can work with: the triplet
/// recovery needs two other labelers for every labeler it scores.
pub const MIN_LABELERS: usize = 3;

/// A binary class label, serialized as `-1` / `1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    pub fn flipped(self) -> Label {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

impl TryFrom<i64> for Label {
    type Error = Error;

    fn try_from(value: i64) -> Result<Self> {
        match value {
            -1 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(Error::InvalidLabel(other)),
        }
    }
}

impl From<Label> for i64 {
    fn from(label: Label) -> i64 {
        label.sign() as i64
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.sign())
    }
}

/// One step of resolved votes, each exactly `-1` or `+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VoteVector(Vec<i8>);

impl VoteVector {
    pub fn new(votes: Vec<i8>) -> Result<Self> {
        if votes.len() < MIN_LABELERS {
            return Err(Error::param(
                "votes",
                format!("need at least {MIN_LABELERS} labelers, got {}", votes.len()),
            ));
        }
        if let Some((position, &value)) = votes.iter().enumerate().find(|(_, v)| v.abs() != 1) {
            return Err(Error::InvalidVote {
                position,
                value: value as i64,
            });
        }
        Ok(VoteVector(votes))
    }

    pub fn from_labels(labels: &[Label]) -> Result<Self> {
        Self::new(labels.iter().map(|l| l.sign()).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        self.0.iter().copied()
    }

    pub fn into_inner(self) -> Vec<i8> {
        self.0
    }
}

impl TryFrom<Vec<i8>> for VoteVector {
    type Error = Error;

    fn try_from(votes: Vec<i8>) -> Result<Self> {
        VoteVector::new(votes)
    }
}

/// One step of unresolved votes; `0` means the labeler abstained.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct RawVoteVector(Vec<i8>);

impl RawVoteVector {
    pub fn new(votes: Vec<i8>) -> Result<Self> {
        if votes.is_empty() {
            return Err(Error::param("votes", "empty vote vector"));
        }
        if let Some((position, &value)) = votes.iter().enumerate().find(|(_, v)| v.abs() > 1) {
            return Err(Error::InvalidVote {
                position,
                value: value as i64,
            });
        }
        Ok(RawVoteVector(votes))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn abstentions(&self) -> usize {
        self.0.iter().filter(|&&v| v == 0).count()
    }
}

impl TryFrom<Vec<i8>> for RawVoteVector {
    type Error = Error;

    fn try_from(votes: Vec<i8>) -> Result<Self> {
        RawVoteVector::new(votes)
    }
}

impl From<RawVoteVector> for Vec<i8> {
    fn from(raw: RawVoteVector) -> Vec<i8> {
        raw.0
    }
}

impl From<VoteVector> for RawVoteVector {
    fn from(votes: VoteVector) -> Self {
        RawVoteVector(votes.0)
    }
}
