use std::fmt;

use coreshell::Error;

/// Every failure the binary reports, with its exit code and the
/// machine-readable prefix printed as `error[<code>]: ...`.
#[derive(Debug)]
pub enum CliError {
    BadInput(String),
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadInput(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match (e, e.root_cause()) {
                (_, Error::NoRoot { .. }) => 4,
                (Error::Stage { .. }, _)
                | (_, Error::NoConvergence { .. } | Error::ProjectionCycle { .. } | Error::Discrepancy { .. }) => 3,
                _ => 2,
            },
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::BadInput(_) => "bad-input",
            CliError::Io(_) => "io",
            CliError::Core(e) => match self.exit_code() {
                4 => "no-root",
                3 => "inversion",
                _ => match e.root_cause() {
                    Error::Degenerate { .. } => "degenerate",
                    Error::Singular { .. } => "singular",
                    Error::GridAlignment { .. } => "grid-alignment",
                    _ => "bad-input",
                },
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            CliError::BadInput(m) | CliError::Io(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        };
        write!(f, "error[{}]: {}", self.code(), text.replace('\n', " "))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
