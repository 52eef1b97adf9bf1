//! Configuration, file output and command implementations behind the
//! `segrad` binary.

pub mod commands;
pub mod config;
pub mod output;

use std::fmt;

pub use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Malformed or out-of-range configuration.
    Config(String),
    Core(segrad_core::Error),
    Io(String),
}

impl CliError {
    /// 2 for validation problems, 3 for numerical failures, 1 for IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
