//! `driftvote` command-line entry point.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BoundArgs, EvalArgs, ExperimentConfig, RunArgs, SimulateArgs};

#[derive(Parser)]
#[command(name = "driftvote", version, about = "Adaptive weak-label aggregation under drift")]
struct Cli {
    /// Write the resolved invocation to this JSON file before running it.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic vote stream (JSONL).
    Simulate(SimulateArgs),
    /// Run one aggregation strategy over a stream and write per-step reports.
    Run(RunArgs),
    /// Summarize report files and compare strategies.
    Eval(EvalArgs),
    /// Print bound constants and, for synthetic layouts, per-window error terms.
    Bound(BoundArgs),
    /// Replay an invocation saved with --save-config.
    Exec {
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| {
        let experiment = match cli.command {
            Command::Simulate(a) => ExperimentConfig::Simulate(a),
            Command::Run(a) => ExperimentConfig::Run(a),
            Command::Eval(a) => ExperimentConfig::Eval(a),
            Command::Bound(a) => ExperimentConfig::Bound(a),
            Command::Exec { config } => ExperimentConfig::load(&config)?,
        };
        if let Some(path) = &cli.save_config {
            experiment.save(path)?;
        }
        experiment.execute()
    })();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let line = serde_json::json!({ "error": format!("{err:#}") });
            eprintln!("{line}");
            ExitCode::FAILURE
        }
    }
}
