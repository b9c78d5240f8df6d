//! File formats, parallel campaigns and the command-line front end on top of
//! [`shieldnn_core`].

pub mod artifact;
pub mod campaign;
pub mod cli;
pub mod config;
pub mod error;
pub mod region;

pub use error::{CliError, ExitCode};
