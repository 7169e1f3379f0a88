use std::fmt;

/// A failed invocation. Invalid input exits with 2, exceeded caps with 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    Invalid(String),
    Capability(String),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Capability(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Capability(m) => write!(f, "capability limit: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cascade_core::Error> for CliError {
    fn from(e: cascade_core::Error) -> Self {
        if e.is_capability() {
            CliError::Capability(e.to_string())
        } else {
            CliError::Invalid(e.to_string())
        }
    }
}
