//! Configuration, file formats, reports and the command line for
//! `liecover-core`.

pub mod app;
pub mod cli;
pub mod config;
pub mod report;
pub mod symbol_io;

pub use app::{run, RunError, RunSummary, Subcommand};
pub use config::{config_hash, parse_config, serialize_config, ConfigError, RunConfig};
