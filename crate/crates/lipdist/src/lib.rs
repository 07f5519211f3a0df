//! Command line, configuration, file formats and the acceptance suite for
//! [`lipdist_core`].

pub mod commands;
pub mod config;
pub mod corpus;
pub mod error;
pub mod io;
pub mod report;
pub mod validate;

pub use config::RunConfig;
pub use error::CliError;
