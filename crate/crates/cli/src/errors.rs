//! Error taxonomy with the exit-code contract:
//! 0 success, 1 numerical-threshold failure, 2 configuration/input failure,
//! 3 solver non-convergence.

use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration, invalid input files, or IO trouble (exit 2).
    Config(String),
    /// Solver failed to converge (exit 3).
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Solver(_) => "solver",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Solver(m) => m,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl From<spinframe_core::Error> for CliError {
    fn from(e: spinframe_core::Error) -> Self {
        match e {
            spinframe_core::Error::NotConverged { .. } => CliError::Solver(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("io error: {e}"))
    }
}

/// The machine-readable error object printed to stdout on failure.
#[derive(Serialize)]
pub struct ErrorObject<'a> {
    pub error: ErrorBody<'a>,
}

#[derive(Serialize)]
pub struct ErrorBody<'a> {
    pub kind: &'a str,
    pub message: &'a str,
    pub exit_code: i32,
}

impl CliError {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ErrorObject {
            error: ErrorBody {
                kind: self.kind(),
                message: self.message(),
                exit_code: self.exit_code(),
            },
        })
        .expect("error serialization")
    }
}

pub type CliResult<T> = Result<T, CliError>;
