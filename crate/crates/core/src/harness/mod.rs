//! Configuration, sweep orchestration and CSV output.

pub mod config;
pub mod experiment;

pub use config::{load_config, ConfigError, ExperimentConfig, Sweep};
pub use experiment::{
    emit_csv, run_experiment, sample_trace, write_csv, AggregateRow, ExperimentError, CSV_HEADER,
};
