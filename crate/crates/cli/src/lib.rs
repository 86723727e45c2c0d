//! Experiment driver for `vfd-core`: TOML configuration, single runs,
//! parameter sweeps, oracle verification and the Moser schedule table.
//!
//! The `vfd` binary is a thin wrapper around [`commands`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod experiment;
pub mod output;
pub mod studies;
pub mod sweep;

pub use config::{ConfigError, ExperimentConfig};
