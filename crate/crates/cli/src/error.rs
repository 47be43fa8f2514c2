use std::fmt;

use divseq::Error;

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input: exit 2.
    Input(String),
    /// A sequence lacks a modulus the operation needs: exit 3.
    Capability(String),
    /// A re-check failed or an internal contract broke: exit 4.
    Verification(String),
    /// Well-formed input that the operation rejects: exit 1.
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Rejected(_) => 1,
            CliError::Input(_) => 2,
            CliError::Capability(_) => 3,
            CliError::Verification(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Capability(m) | CliError::Verification(m) | CliError::Rejected(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capability { .. } => CliError::Capability(e.to_string()),
            Error::OracleBreach { .. } => CliError::Verification(e.to_string()),
            _ => CliError::Rejected(e.to_string()),
        }
    }
}

/// A JSON error with its position in the named source.
pub fn json_error(source: &str, e: &serde_json::Error) -> CliError {
    CliError::Input(format!(
        "malformed JSON in {source} at line {}, column {}: {e}",
        e.line(),
        e.column()
    ))
}

/// A schema error inside an already-parsed value; the path names the field.
pub fn shape_error(source: &str, what: &str, e: &serde_json::Error) -> CliError {
    CliError::Input(format!("{source}: {what} does not match the expected shape: {e}"))
}
