//! Seeded experiment sweeps over random coloured graphs, empirical threshold
//! estimation, and CSV/JSON persistence.

mod config;
mod error;
mod output;
mod stats;
mod sweep;
mod threshold;

pub use config::{Coloring, ExperimentConfig, GridPoint, PSpec};
pub use error::{HarnessError, Result};
pub use output::{read_records, write_csv, write_json, write_outputs, CsvRow, OutputPaths};
pub use stats::{wilson_interval, Z95};
pub use sweep::{
    in_pool, replay, run_sweep, run_sweep_with, run_trial, sample_graph, summarize, ExperimentRecord, GridSummary,
    TrialOutcome, TrialSetup,
};
pub use threshold::{estimate_threshold, Evaluation, ThresholdOptions, ThresholdOutcome, ThresholdReport};
