//! Streaming aggregation of noisy binary labelers whose accuracies drift.
//!
//! At every step the engine picks how much history to trust by comparing
//! empirical vote-correlation matrices over a ladder of trailing windows,
//! recovers each labeler's accuracy from the chosen matrix, and predicts with
//! log-odds weighted voting.
//!
//! ```
//! use driftvote::{run_strategy, AdaptiveConfig, Strategy, VoteVector};
//!
//! let config = AdaptiveConfig::with_defaults(3).unwrap();
//! let stream = vec![
//!     (VoteVector::new(vec![1, 1, -1]).unwrap(), None),
//!     (VoteVector::new(vec![-1, -1, -1]).unwrap(), None),
//! ];
//! let reports = run_strategy(stream, Strategy::Adaptive, &config).unwrap();
//! assert_eq!(reports.len(), 2);
//! ```

pub mod adaptive;
pub mod aggregate;
pub mod bounds;
pub mod config;
pub mod corrwin;
pub mod driftgen;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod triplet;
pub mod votes;

pub use adaptive::{select_window, threshold, threshold_value, StopReason, WindowDecision};
pub use aggregate::{majority_vote, predict, run_strategy, weights_from_accuracies, Strategy, StrategyRunner, WeightVector};
pub use bounds::{compute_a_const, compute_phi, statistical_term, DiagnosticBound};
pub use config::{AdaptiveConfig, ClipRange, WindowSchedule};
pub use corrwin::{CorrelationMatrix, WindowedCorrelationBank};
pub use driftgen::{generate_synthetic, SyntheticStreamConfig, StreamStep};
pub use error::{Error, Result};
pub use ingest::{StepReport, StreamRecord};
pub use triplet::{exact_correlation_from_p, recover_accuracies, AccuracyEstimate};
pub use votes::{Label, RawVoteVector, VoteVector};
