//! Experiment harness: configuration files, seeded trial execution and the
//! CSV / JSON outputs of the `rankone` command.

pub mod config;
mod error;
pub mod output;
pub mod run;
pub mod stats;

pub use error::CliError;
