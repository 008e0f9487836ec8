//! Command-line driver for `afl-core`: JSON input schemas, report output,
//! the scan journal and subcommand dispatch.

pub mod cli;
pub mod journal;
pub mod report;
pub mod schema;

pub use afl_core;
