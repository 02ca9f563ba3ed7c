use std::fmt;

use ecag_core::Error;

/// Exit codes: 0 ok, 1 usage, 2 invariant violation, 3 cap exceeded.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(&'static str, Error),
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Invariant(_) => 2,
            CliError::Core(_, e) => match e {
                Error::CapExceeded(_) | Error::TooLarge(_) => 3,
                Error::HasseViolation { .. }
                | Error::DecompositionFailure(_)
                | Error::InvariantViolation(_)
                | Error::DegenerateBasis
                | Error::RankDeficient { .. } => 2,
                _ => 1,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
            CliError::Core(ctx, e) => write!(f, "{ctx}: {e}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
        }
    }
}

/// Attaches the module name to a core error.
pub trait Context<T> {
    fn ctx(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> Context<T> for ecag_core::Result<T> {
    fn ctx(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|e| CliError::Core(module, e))
    }
}
