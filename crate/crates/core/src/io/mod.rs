//! File formats, rendering, the benchmark harness and the command
//! implementations behind the CLI.

pub mod bench;
pub mod commands;
pub mod config;
pub mod map;
pub mod render;
pub mod result;
pub mod rewards;

use std::fmt;

use thiserror::Error;

pub use config::Config;
pub use map::{parse_map, write_map};
pub use render::{render_svg, RenderError};
pub use result::{verify_result, ResultFile};
pub use rewards::{parse_rewards, write_rewards};

/// A located parse failure. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{file}: {source}")]
    Parse { file: String, source: ParseError },
    #[error("{file}: {source}")]
    Json {
        file: String,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("invariant violated: {key}: {reason}")]
    Invariant { key: String, reason: String },
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invariant(key: impl Into<String>, reason: impl fmt::Display) -> Self {
        Error::Invariant {
            key: key.into(),
            reason: reason.to_string(),
        }
    }

    /// Process exit code: 1 for usage and parse problems, 2 for invariant
    /// violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant { .. } => 2,
            _ => 1,
        }
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn write_file(path: &std::path::Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}
