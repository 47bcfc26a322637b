use std::fmt;
use std::path::Path;

use bearguard_core::Error;

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Missing, unreadable or unparsable input; refusal to overwrite.
    Input(String),
    /// Inputs parse but violate a domain invariant.
    Domain(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    /// Classifies a library error raised while reading `path`.
    pub fn reading(path: &Path, e: Error) -> Self {
        let msg = format!("{}: {e}", path.display());
        match e {
            Error::Io(_)
            | Error::Parse { .. }
            | Error::UnknownClass(_)
            | Error::InvalidBox { .. }
            | Error::InvalidConfidence(_) => CliError::Input(msg),
            _ => CliError::Domain(msg),
        }
    }

    pub fn domain(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}
