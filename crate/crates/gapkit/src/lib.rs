//! File formats, configuration, reports and the command pipelines behind the `gapkit` binary.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod dsl;
pub mod io;
pub mod report;
pub mod verify;

pub use commands::{emit, run, CliError, Command, Outcome};
pub use config::RunConfig;
