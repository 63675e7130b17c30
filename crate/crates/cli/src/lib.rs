//! File formats and command-line front end for `ncfun-core`.
//!
//! Exit codes: 0 success, 1 a check ran and failed, 2 usage, parse,
//! configuration or precondition error, 3 point outside the domain,
//! 4 numeric failure, 5 Taylor coefficient extraction failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod io;

pub use commands::{run, Cli, Command, Method};
pub use config::CliConfig;
pub use error::CliError;
