//! Command-line front end for exact conformally invariant quantization.
//!
//! - [`config`]: chart files (TOML, exact `"p/q"` numbers).
//! - [`commands`]: coefficient tables, word expansions and point evaluation.
//! - [`verify`]: seeded verification suites and their reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod verify;

pub use error::{CliError, CliResult};
