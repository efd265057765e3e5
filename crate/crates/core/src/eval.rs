//! Post-run metrics over step reports.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::StepReport;
use crate::votes::Label;

pub const DEFAULT_ROLLING_K: usize = 128;

fn correctness(reports: &[StepReport]) -> Result<Vec<bool>> {
    reports
        .iter()
        .map(|r| r.truth.map(|y| y == r.prediction).ok_or(Error::MissingTruth))
        .collect()
}

pub fn accuracy(reports: &[StepReport]) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::Empty);
    }
    let hits = correctness(reports)?.iter().filter(|&&c| c).count();
    Ok(hits as f64 / reports.len() as f64)
}

/// Forward-looking mean correctness: entry `t` averages steps `t..t+k`,
/// truncated at the end of the run.
pub fn rolling_accuracy(reports: &[StepReport], k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::param("k", "lookahead must be at least 1"));
    }
    let correct = correctness(reports)?;
    let mut prefix = Vec::with_capacity(correct.len() + 1);
    prefix.push(0usize);
    for &c in &correct {
        prefix.push(prefix.last().unwrap() + usize::from(c));
    }
    let len = correct.len();
    Ok((0..len)
        .map(|t| {
            let end = (t + k).min(len);
            (prefix[end] - prefix[t]) as f64 / (end - t) as f64
        })
        .collect())
}

/// F1 for the positive class; 0 when precision + recall is 0.
pub fn f1_score(reports: &[StepReport]) -> Result<f64> {
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for r in reports {
        let truth = r.truth.ok_or(Error::MissingTruth)?;
        match (r.prediction, truth) {
            (Label::Positive, Label::Positive) => tp += 1,
            (Label::Positive, Label::Negative) => fp += 1,
            (Label::Negative, Label::Positive) => fneg += 1,
            _ => {}
        }
    }
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fneg == 0 { 0.0 } else { tp as f64 / (tp + fneg) as f64 };
    if precision + recall == 0.0 {
        Ok(0.0)
    } else {
        Ok(2.0 * precision * recall / (precision + recall))
    }
}

/// Counts of the effective window length used per step. Reports without a
/// window (majority voting) are not counted.
pub fn window_histogram(reports: &[StepReport]) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for r in reports {
        if let Some(w) = r.window {
            *hist.entry(w).or_insert(0) += 1;
        }
    }
    hist
}

/// Lower median of the windows used.
pub fn median_window(reports: &[StepReport]) -> Option<usize> {
    let mut windows: Vec<usize> = reports.iter().filter_map(|r| r.window).collect();
    if windows.is_empty() {
        return None;
    }
    windows.sort_unstable();
    Some(windows[(windows.len() - 1) / 2])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub steps: usize,
    pub accuracy: f64,
    pub f1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub median_window: Option<usize>,
    pub window_histogram: BTreeMap<usize, usize>,
    pub rolling_k: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rolling_accuracy: Vec<f64>,
}

impl RunSummary {
    pub fn from_reports(name: impl Into<String>, reports: &[StepReport], rolling_k: usize) -> Result<Self> {
        Ok(RunSummary {
            name: name.into(),
            steps: reports.len(),
            accuracy: accuracy(reports)?,
            f1: f1_score(reports)?,
            median_window: median_window(reports),
            window_histogram: window_histogram(reports),
            rolling_k,
            rolling_accuracy: rolling_accuracy(reports, rolling_k)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub name: String,
    pub steps: usize,
    pub accuracy: f64,
    pub f1: f64,
}

/// Rows sorted by accuracy, best first.
pub fn comparison_table(summaries: &[RunSummary]) -> Vec<ComparisonRow> {
    let mut rows: Vec<ComparisonRow> = summaries
        .iter()
        .map(|s| ComparisonRow {
            name: s.name.clone(),
            steps: s.steps,
            accuracy: s.accuracy,
            f1: s.f1,
        })
        .collect();
    rows.sort_by(|a, b| b.accuracy.total_cmp(&a.accuracy).then_with(|| a.name.cmp(&b.name)));
    rows
}

/// Writes `step,value` rows with one-based steps.
pub fn write_series_csv(path: &Path, series: &[f64]) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
    writeln!(out, "step,value").map_err(io)?;
    for (i, v) in series.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, v).map_err(io)?;
    }
    out.flush().map_err(io)
}
