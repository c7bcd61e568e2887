//! Command-line front end for the disparity indices: ingest microdata,
//! grouped summaries or scenario files, run index / variance / sweep /
//! null-simulation commands and emit JSON or CSV.

pub mod commands;
pub mod emit;
pub mod error;
pub mod ingest;

pub use commands::{run, Cli, Command, RunArgs};
pub use error::{CliError, CliResult};
