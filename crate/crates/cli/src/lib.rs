//! Experiment runner behind the `medq` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::{DatasetSource, ExperimentConfig, Overrides};
pub use error::CliError;
