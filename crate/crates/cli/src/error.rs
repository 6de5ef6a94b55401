use std::fmt;

/// Failures of the command-line tool, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags.
    Usage(String),
    /// A file that does not parse or validate.
    Input(String),
    Io(String),
    /// The computation itself failed (singular Jacobian, pole on the
    /// integration path, ...).
    Compute(parabolic_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 3,
            CliError::Io(_) => 4,
            CliError::Compute(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Input(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<parabolic_core::Error> for CliError {
    fn from(e: parabolic_core::Error) -> Self {
        CliError::Compute(e)
    }
}
