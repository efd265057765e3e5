use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use driftvote::bounds::{statistical_term, window_error_bound, DiagnosticBound};
use driftvote::driftgen::{
    apply_permute_drift, generate_synthetic, parse_blocks, resolve_stream, true_drift_error,
    StreamStep, SyntheticStreamConfig, PAPER_BLOCK_LEN,
};
use driftvote::eval::{comparison_table, write_series_csv, RunSummary, DEFAULT_ROLLING_K};
use driftvote::ingest::{read_reports, read_stream, write_reports, write_stream};
use driftvote::{run_strategy, AdaptiveConfig, ClipRange, Strategy, WindowSchedule};

const PAPER_PRESET: &str = "paper-synthetic";

/// Block layout shared by `simulate` and `bound`.
#[derive(Args, Clone, Debug, Default, Serialize, Deserialize)]
pub struct StreamLayout {
    /// Named layout; `paper-synthetic` is three labelers over blocks T, 2T, T.
    #[arg(long, conflicts_with = "blocks")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,

    /// Explicit blocks, e.g. "100:0.9,0.9,0.6;200:0.6,0.9,0.9".
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<String>,

    /// Block length T for the preset.
    #[arg(long, default_value_t = PAPER_BLOCK_LEN)]
    #[serde(default = "default_block_len")]
    pub block_len: usize,
}

fn default_block_len() -> usize {
    PAPER_BLOCK_LEN
}

impl StreamLayout {
    fn is_set(&self) -> bool {
        self.preset.is_some() || self.blocks.is_some()
    }

    fn build(&self, seed: u64) -> Result<SyntheticStreamConfig> {
        match (&self.preset, &self.blocks) {
            (Some(p), _) if p == PAPER_PRESET => {
                Ok(SyntheticStreamConfig::paper_preset(self.block_len, seed)?)
            }
            (Some(p), _) => bail!("unknown preset {p:?} (known: {PAPER_PRESET})"),
            (None, Some(b)) => Ok(SyntheticStreamConfig::new(parse_blocks(b)?, seed)?),
            (None, None) => bail!("need --preset or --blocks"),
        }
    }
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub layout: StreamLayout,

    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub seed: u64,

    /// Per-step probability of reshuffling labeler identities.
    #[arg(long, default_value_t = 0.0)]
    #[serde(default)]
    pub permute_prob: f64,

    #[arg(long)]
    pub out: PathBuf,
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let config = args.layout.build(args.seed)?;
    let mut steps = generate_synthetic(&config);
    if args.permute_prob > 0.0 {
        steps = apply_permute_drift(&steps, args.permute_prob, args.seed)?;
    }
    let records: Vec<_> = steps
        .iter()
        .enumerate()
        .map(|(i, s)| s.to_record(i as u64 + 1))
        .collect();
    write_stream(&args.out, &records)?;
    Ok(())
}

fn parse_clip(s: &str) -> Result<ClipRange> {
    let (lo, hi) = s
        .split_once(':')
        .with_context(|| format!("clip must look like LO:HI, got {s:?}"))?;
    Ok(ClipRange::new(lo.trim().parse()?, hi.trim().parse()?)?)
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct RunArgs {
    #[arg(long)]
    pub input: PathBuf,

    /// adaptive | fixed:R | majority
    #[arg(long, default_value = "adaptive")]
    pub strategy: String,

    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,

    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    /// Number of window sizes; the ladder is 1, 2, 4, ..., 2^(m-1).
    #[arg(long, default_value_t = 20)]
    pub m: usize,

    #[arg(long, default_value = "0.1:0.9")]
    pub clip: String,

    /// Seed for replacing abstentions with random votes.
    #[arg(long, default_value_t = 0)]
    #[serde(default)]
    pub abstain_seed: u64,

    /// Expected labeler count; checked against the input when given.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,

    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &RunArgs) -> Result<()> {
    let strategy: Strategy = args.strategy.parse()?;
    let records = read_stream(&args.input)?;
    let Some(first) = records.first() else {
        bail!("{}: stream is empty", args.input.display());
    };
    let n = first.votes.len();
    if let Some(expected) = args.n {
        ensure!(expected == n, "input has {n} labelers, --n says {expected}");
    }
    let config = AdaptiveConfig::new(
        n,
        WindowSchedule::powers_of_two(args.m)?,
        args.beta,
        args.delta,
        parse_clip(&args.clip)?,
    )?;
    let steps: Vec<StreamStep> = records.into_iter().map(StreamStep::from).collect();
    let reports = run_strategy(resolve_stream(&steps, args.abstain_seed)?, strategy, &config)?;
    write_reports(&args.out, &reports)?;
    Ok(())
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct EvalArgs {
    /// One or more report files.
    #[arg(long, num_args = 1.., required = true)]
    pub reports: Vec<PathBuf>,

    /// Lookahead for the rolling accuracy series.
    #[arg(long, default_value_t = DEFAULT_ROLLING_K)]
    pub rolling_k: usize,

    /// Summary JSON destination; stdout when omitted.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    /// Directory for `<name>.rolling.csv` series.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct EvalOutput {
    runs: Vec<RunSummary>,
    comparison: Vec<driftvote::eval::ComparisonRow>,
}

fn run_name(path: &Path) -> String {
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix(".jsonl").unwrap_or(&name).to_string()
}

pub fn eval(args: &EvalArgs) -> Result<()> {
    let mut runs = Vec::new();
    for path in &args.reports {
        let reports = read_reports(path)?;
        ensure!(!reports.is_empty(), "{}: no reports", path.display());
        let name = run_name(path);
        let mut summary = RunSummary::from_reports(&name, &reports, args.rolling_k)
            .with_context(|| path.display().to_string())?;
        let series = std::mem::take(&mut summary.rolling_accuracy);
        if let Some(dir) = &args.series_dir {
            fs::create_dir_all(dir).with_context(|| dir.display().to_string())?;
            write_series_csv(&dir.join(format!("{name}.rolling.csv")), &series)?;
        }
        runs.push(summary);
    }
    let output = EvalOutput {
        comparison: comparison_table(&runs),
        runs,
    };
    emit_json(&output, args.out.as_deref())
}

#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct BoundArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,

    #[arg(long, default_value_t = 20)]
    pub m: usize,

    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,

    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,

    /// Accuracy margin: every labeler is at least 1/2 + tau accurate.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,

    /// Also tabulate Phi over a range of beta values.
    #[arg(long)]
    #[serde(default)]
    pub beta_sweep: bool,

    /// Synthetic layout for the drift terms.
    #[command(flatten)]
    #[serde(flatten)]
    pub layout: StreamLayout,

    /// Step at which to evaluate drift terms; defaults to the last step.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,

    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

pub const BETA_SWEEP: [f64; 9] = [0.01, 0.02, 0.05, 0.1, 0.2, std::f64::consts::SQRT_2 - 1.0, 0.5, 0.75, 1.0];

#[derive(Serialize)]
struct WindowTerms {
    r: usize,
    statistical: f64,
    drift: f64,
    drift_bound: f64,
    error_bound: f64,
}

#[derive(Serialize)]
struct SweepRow {
    beta: f64,
    phi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    accuracy_prefactor: Option<f64>,
}

#[derive(Serialize)]
struct BoundOutput {
    n: usize,
    m: usize,
    delta: f64,
    beta: f64,
    #[serde(flatten)]
    bound: DiagnosticBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    windows: Vec<WindowTerms>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    beta_sweep: Vec<SweepRow>,
}

pub fn bound(args: &BoundArgs) -> Result<()> {
    let schedule = WindowSchedule::powers_of_two(args.m)?;
    let bound = DiagnosticBound::new(args.n, &schedule, args.beta, args.delta, args.tau)?;

    let mut t = None;
    let mut windows = Vec::new();
    if args.layout.is_set() {
        let config = args.layout.build(0)?;
        ensure!(config.n == args.n, "layout has {} labelers, --n says {}", config.n, args.n);
        let at = args.t.unwrap_or(config.total_len() as u64);
        for &r in schedule.sizes().iter().filter(|&&r| r as u64 <= at) {
            let drift = true_drift_error(&config, r, at)?;
            windows.push(WindowTerms {
                r,
                statistical: statistical_term(r, bound.a_const),
                drift: drift.drift,
                drift_bound: drift.bound_term,
                error_bound: window_error_bound(r, bound.a_const, drift.drift),
            });
        }
        t = Some(at);
    }

    let beta_sweep = if args.beta_sweep {
        BETA_SWEEP
            .iter()
            .map(|&beta| {
                let d = DiagnosticBound::new(args.n, &schedule, beta, args.delta, args.tau)?;
                Ok(SweepRow {
                    beta,
                    phi: d.phi,
                    accuracy_prefactor: d.accuracy_prefactor,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let output = BoundOutput {
        n: args.n,
        m: args.m,
        delta: args.delta,
        beta: args.beta,
        bound,
        t,
        windows,
        beta_sweep,
    };
    emit_json(&output, args.out.as_deref())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).with_context(|| path.display().to_string())?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// A fully specified invocation, storable as one JSON file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Simulate(SimulateArgs),
    Run(RunArgs),
    Eval(EvalArgs),
    Bound(BoundArgs),
}

impl ExperimentConfig {
    pub fn execute(&self) -> Result<()> {
        match self {
            ExperimentConfig::Simulate(a) => simulate(a),
            ExperimentConfig::Run(a) => run(a),
            ExperimentConfig::Eval(a) => eval(a),
            ExperimentConfig::Bound(a) => bound(a),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
        serde_json::from_str(&text).with_context(|| format!("{}: invalid config", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)? + "\n";
        fs::write(path, text).with_context(|| path.display().to_string())
    }
}
