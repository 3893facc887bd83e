//! Experiment runner for `swaphedge-core`: configuration files, parallel
//! Monte Carlo, CSV results with metadata, run manifests and strategy files.
//!
//! The `swaphedge` binary exposes one subcommand per experiment; everything it
//! does is also available through [`experiments::execute`].

#![deny(rust_2018_idioms)]

pub mod config;
pub mod experiments;
pub mod montecarlo;
pub mod output;
pub mod strategy_io;

pub use config::Config;
pub use experiments::{apply_overrides, execute, Experiment, Overrides};
