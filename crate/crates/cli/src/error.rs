use thiserror::Error;

/// CLI failures, each with its own process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("capacity: {0}")]
    Capacity(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub const EXIT_RUNTIME: i32 = 1;
    pub const EXIT_USAGE: i32 = 2;
    pub const EXIT_CAPACITY: i32 = 3;
    pub const EXIT_IO: i32 = 4;
    pub const EXIT_INVARIANT: i32 = 5;

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) => Self::EXIT_RUNTIME,
            CliError::Usage(_) => Self::EXIT_USAGE,
            CliError::Capacity(_) => Self::EXIT_CAPACITY,
            CliError::Io(_) => Self::EXIT_IO,
            CliError::Invariant(_) => Self::EXIT_INVARIANT,
        }
    }

    pub(crate) fn io(e: impl std::fmt::Display) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<pareto_records::Error> for CliError {
    fn from(e: pareto_records::Error) -> Self {
        use pareto_records::Error as E;
        let msg = e.to_string();
        match e {
            E::Tie { .. } | E::Incomparable { .. } | E::Domain(_) => CliError::Usage(msg),
            E::Capacity { .. } => CliError::Capacity(msg),
            E::PartialResult { .. } => CliError::Runtime(msg),
            E::InvariantViolation { .. } => CliError::Invariant(msg),
        }
    }
}
