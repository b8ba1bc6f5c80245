//! Experiment runner for impurity-model spectral reconstruction.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
pub use pipeline::{Method, Reconstruction};
