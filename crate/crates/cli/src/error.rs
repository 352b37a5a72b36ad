use std::fmt;
use std::io;
use std::path::Path;

use percussim_core::LibraryError;

/// Process exit codes. Usage errors (2) are reported by the argument parser.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const IO: i32 = 3;
    pub const INVALID: i32 = 4;
    pub const MISMATCH: i32 = 5;
    pub const PORT_IN_USE: i32 = 6;
}

#[derive(Debug)]
pub enum CliError {
    Io {
        path: String,
        source: io::Error,
    },
    Invalid(String),
    Mismatch(String),
    PortInUse(String),
    Other(String),
    /// Already printed; only the exit code remains.
    Reported(i32),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit::IO,
            CliError::Invalid(_) => exit::INVALID,
            CliError::Mismatch(_) => exit::MISMATCH,
            CliError::PortInUse(_) => exit::PORT_IN_USE,
            CliError::Other(_) => exit::OTHER,
            CliError::Reported(code) => *code,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } if path.is_empty() => write!(f, "{source}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Invalid(m) | CliError::Mismatch(m) | CliError::Other(m) => f.write_str(m),
            CliError::PortInUse(addr) => write!(f, "{addr}: address already in use"),
            CliError::Reported(_) => Ok(()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<LibraryError> for CliError {
    fn from(e: LibraryError) -> Self {
        match e {
            LibraryError::Io { path, reason } => CliError::Io {
                path,
                source: io::Error::other(reason),
            },
            other => CliError::Invalid(other.to_string()),
        }
    }
}
