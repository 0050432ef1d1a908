//! Experiment harness around `marriage-core`: TOML configuration, one run
//! directory per invocation, CSV/PGM artifacts and a hashed manifest.

pub mod commands;
pub mod config;
pub mod error;
pub mod run;

pub use commands::{run, Command};
pub use config::{ExperimentConfig, Overrides};
pub use error::{CliError, Result};
