//! Experiment orchestration: configs, seeding, parallel episodes, aggregation,
//! CSV output, and the oracle verification suite.

mod aggregate;
mod config;
mod episode;
mod output;
pub mod verify;

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub use aggregate::{loglog_slope, AggregateCurve, CurvePoint};
pub use config::{parse_agent, CheckpointPolicy, ExperimentConfig, DENSE_PREFIX, POINTS_PER_DECADE};
pub use episode::{episode_seed, run_episode, run_experiment, simulate, Episode, ExperimentResult};
pub use output::{read_aggregate_csv, trace_csv_string, write_aggregate_csv, write_trace_csv, OutputFiles};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invalid config: {0}")]
    Invalid(String),

    #[error(transparent)]
    Simulation(#[from] crate::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },

    #[error("{}: {message}", path.display())]
    Schema { path: PathBuf, message: String },

    #[error("slope: {0}")]
    Slope(String),
}
