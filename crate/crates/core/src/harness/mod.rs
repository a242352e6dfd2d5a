//! Experiment configuration, orchestration and result output.

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{ExperimentConfig, Scheme};
pub use experiment::{derive_grid, run_experiment, run_sweep, run_trial, ExperimentContext};
pub use output::{format_csv, parse_csv, read_csv, summarize, write_csv, GroupStats, ResultRecord, Setting, Summary, CSV_HEADER};
