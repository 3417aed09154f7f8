//! Front end for the optimizer-gap harness: experiment configuration,
//! report serialization and the `optgap` subcommands.

pub mod commands;
pub mod config;
pub mod csv_export;
pub mod dto;
pub mod error;

pub use error::CliError;
