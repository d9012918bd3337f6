//! Command-line front end: request parsing, execution and rendering.

pub mod document;
pub mod request;
pub mod run;

pub use document::{render_output, ResultDocument};
pub use request::{parse_request, ComputationRequest, Format, Mode, RequestConfig};
pub use run::{execute, execute_with_threads};

/// Environment variable holding the worker count.
pub const THREADS_VAR: &str = "TAUTCHERN_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tautchern_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for I/O failures, 2 for anything the user supplied.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

/// Worker count from the environment, if set.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_VAR} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}
