//! Scenario runner: parses a config file, runs the invariant pipeline for
//! each branch, and writes CSV series plus pass/fail reports.

pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod report;

pub use error::{CliError, EXIT_NUMERICAL, EXIT_VALIDATION};
pub use pipeline::{run, scan_j, verify, Outcome, OUT_DIR_ENV};
