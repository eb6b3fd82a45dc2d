//! Configuration, orchestration and file output for the `rotor-gpe` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod studies;
pub mod verify;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
