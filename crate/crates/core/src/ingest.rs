//! Vote-stream and report files.
//!
//! Streams are JSONL (`{"votes":[1,-1,0],"label":1,"t":7}`, `label` and `t`
//! optional) or CSV with a header row, where a column named `label` holds the
//! ground truth, a column named `t` the step index, and every other column a
//! labeler's vote. Abstentions are `0`. Reports are JSONL, one per step.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::adaptive::StopReason;
use crate::error::{Error, Result};
use crate::votes::{Label, RawVoteVector};

/// One line of a vote-stream file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamRecord {
    pub votes: RawVoteVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
}

/// What happened at one step of a strategy run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// One-based step index.
    pub t: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_hat: Option<Vec<f64>>,
    pub weights: Vec<f64>,
    pub prediction: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correct: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_reason: Option<StopReason>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamFormat {
    Jsonl,
    Csv,
}

impl StreamFormat {
    /// `.csv` files are CSV, everything else JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => StreamFormat::Csv,
            _ => StreamFormat::Jsonl,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_stream(path: &Path) -> Result<Vec<StreamRecord>> {
    let file = File::open(path).map_err(io_err(path))?;
    let name = path.display().to_string();
    match StreamFormat::from_path(path) {
        StreamFormat::Jsonl => parse_jsonl_stream(BufReader::new(file), &name),
        StreamFormat::Csv => parse_csv_stream(file, &name),
    }
}

fn parse_error(source: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: source.to_string(),
        line,
        message: message.into(),
    }
}

/// Checks one record against the labeler count fixed by the first record.
fn check_width(source: &str, line: usize, n: &mut Option<usize>, width: usize) -> Result<()> {
    match *n {
        None => *n = Some(width),
        Some(expected) if expected != width => {
            return Err(parse_error(
                source,
                line,
                format!("expected {expected} votes, found {width}"),
            ))
        }
        _ => {}
    }
    Ok(())
}

#[derive(Deserialize)]
struct WireRecord {
    votes: Vec<i64>,
    #[serde(default)]
    label: Option<i64>,
    #[serde(default)]
    t: Option<u64>,
}

fn vote_from(source: &str, line: usize, position: usize, value: i64) -> Result<i8> {
    match value {
        -1..=1 => Ok(value as i8),
        other => Err(parse_error(
            source,
            line,
            format!("invalid vote {other} at position {position}"),
        )),
    }
}

fn label_from(source: &str, line: usize, value: i64) -> Result<Label> {
    Label::try_from(value).map_err(|e| parse_error(source, line, e.to_string()))
}

pub fn parse_jsonl_stream<R: BufRead>(reader: R, source: &str) -> Result<Vec<StreamRecord>> {
    let mut records = Vec::new();
    let mut n = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| parse_error(source, line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let wire: WireRecord = serde_json::from_str(&line)
            .map_err(|e| parse_error(source, line_no, e.to_string()))?;
        let votes = wire
            .votes
            .iter()
            .enumerate()
            .map(|(pos, &v)| vote_from(source, line_no, pos, v))
            .collect::<Result<Vec<i8>>>()?;
        check_width(source, line_no, &mut n, votes.len())?;
        let votes = RawVoteVector::new(votes).map_err(|e| parse_error(source, line_no, e.to_string()))?;
        let label = wire.label.map(|l| label_from(source, line_no, l)).transpose()?;
        records.push(StreamRecord {
            votes,
            label,
            t: wire.t,
        });
    }
    Ok(records)
}

pub fn parse_csv_stream<R: Read>(reader: R, source: &str) -> Result<Vec<StreamRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| parse_error(source, 1, e.to_string()))?
        .clone();
    let label_col = headers.iter().position(|h| h == "label");
    let t_col = headers.iter().position(|h| h == "t");
    let vote_cols: Vec<usize> = (0..headers.len())
        .filter(|&c| Some(c) != label_col && Some(c) != t_col)
        .collect();

    let mut records = Vec::new();
    for (idx, row) in rdr.records().enumerate() {
        // header occupies line 1
        let line_no = idx + 2;
        let row = row.map_err(|e| parse_error(source, line_no, e.to_string()))?;
        let int = |col: usize| -> Result<i64> {
            let cell = row.get(col).unwrap_or("");
            cell.parse::<i64>().map_err(|_| {
                parse_error(source, line_no, format!("column {}: not an integer: {cell:?}", col + 1))
            })
        };
        let votes = vote_cols
            .iter()
            .enumerate()
            .map(|(pos, &c)| vote_from(source, line_no, pos, int(c)?))
            .collect::<Result<Vec<i8>>>()?;
        let votes = RawVoteVector::new(votes).map_err(|e| parse_error(source, line_no, e.to_string()))?;
        let label = match label_col {
            Some(c) if !row.get(c).unwrap_or("").is_empty() => {
                Some(label_from(source, line_no, int(c)?)?)
            }
            _ => None,
        };
        let t = match t_col {
            Some(c) if !row.get(c).unwrap_or("").is_empty() => Some(int(c)? as u64),
            _ => None,
        };
        records.push(StreamRecord { votes, label, t });
    }
    Ok(records)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(|e| io_err(path)(e.into()))?;
        out.write_all(b"\n").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).map_err(io_err(path))?;
    let name = path.display().to_string();
    let mut items = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line).map_err(|e| parse_error(&name, idx + 1, e.to_string()))?);
    }
    Ok(items)
}

/// Writes a stream as JSONL.
pub fn write_stream(path: &Path, records: &[StreamRecord]) -> Result<()> {
    write_jsonl(path, records)
}

pub fn write_reports(path: &Path, reports: &[StepReport]) -> Result<()> {
    write_jsonl(path, reports)
}

pub fn read_reports(path: &Path) -> Result<Vec<StepReport>> {
    read_jsonl(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn jsonl(text: &str) -> Result<Vec<StreamRecord>> {
        parse_jsonl_stream(text.as_bytes(), "mem")
    }

    #[test]
    fn jsonl_record_with_abstention() {
        let recs = jsonl("{\"votes\":[1,-1,0],\"label\":1}\n").unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].votes.as_slice(), &[1, -1, 0]);
        assert_eq!(recs[0].votes.abstentions(), 1);
        assert_eq!(recs[0].label, Some(Label::Positive));
        assert_eq!(recs[0].t, None);
    }

    #[test]
    fn csv_matches_jsonl() {
        let csv = parse_csv_stream("v1,v2,v3,label\n1,-1,0,1\n".as_bytes(), "mem").unwrap();
        assert_eq!(csv, jsonl("{\"votes\":[1,-1,0],\"label\":1}").unwrap());
        let unlabeled = parse_csv_stream("votes_1,votes_2,votes_3\n0,0,1\n".as_bytes(), "mem").unwrap();
        assert_eq!(unlabeled[0].label, None);
        let with_t = parse_csv_stream("t,a,b,c,label\n4,1,1,1,\n".as_bytes(), "mem").unwrap();
        assert_eq!(with_t[0].t, Some(4));
        assert_eq!(with_t[0].label, None);
    }

    #[test]
    fn invalid_vote_names_line_and_value() {
        let err = jsonl("{\"votes\":[1,1,1]}\n{\"votes\":[2,0,0]}\n").unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{msg}");
        assert!(msg.contains("invalid vote 2"), "{msg}");

        let err = parse_csv_stream("a,b,c\n1,1,1\n1,x,1\n".as_bytes(), "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn inconsistent_width_and_bad_label() {
        let err = jsonl("{\"votes\":[1,1,1]}\n{\"votes\":[1,1]}\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = jsonl("{\"votes\":[1,1,1],\"label\":0}\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(jsonl("not json\n").is_err());
    }

    #[test]
    fn report_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let reports = vec![
            StepReport {
                t: 1,
                window: Some(1),
                p_hat: Some(vec![0.9, 0.1 + 0.2, 2.0 / 3.0]),
                weights: vec![9f64.ln(), -0.847_297_860_387_203_4, std::f64::consts::LN_2],
                prediction: Label::Negative,
                truth: Some(Label::Negative),
                correct: Some(true),
                stop_reason: Some(StopReason::HorizonReached),
            },
            StepReport {
                t: 2,
                window: None,
                p_hat: None,
                weights: vec![1.0; 3],
                prediction: Label::Positive,
                truth: None,
                correct: None,
                stop_reason: None,
            },
        ];
        write_reports(&path, &reports).unwrap();
        assert_eq!(read_reports(&path).unwrap(), reports);
        let text = std::fs::read_to_string(&path).unwrap();
        let second = text.lines().nth(1).unwrap();
        assert!(!second.contains("correct") && !second.contains("truth"));
        assert!(text.starts_with("{\"t\":1,\"window\":1,\"p_hat\":"));

        let empty = dir.path().join("e.jsonl");
        write_reports(&empty, &[]).unwrap();
        assert_eq!(std::fs::metadata(&empty).unwrap().len(), 0);
    }

    #[test]
    fn stream_round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.jsonl");
        let recs = jsonl("{\"votes\":[1,-1,0],\"label\":-1,\"t\":3}\n{\"votes\":[0,0,0]}\n").unwrap();
        write_stream(&path, &recs).unwrap();
        assert_eq!(read_stream(&path).unwrap(), recs);
        assert!(read_stream(&dir.path().join("missing.jsonl")).is_err());
    }
}
