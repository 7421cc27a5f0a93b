//! Command-line front end for `maass-core`: configuration, the form cache,
//! CSV reports and the harness behind every subcommand.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{run, RunOutput};
pub use config::{parse_config, Parsed, RunConfig};
pub use error::{CliError, CliResult};
