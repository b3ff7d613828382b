use thiserror::Error;

/// Failures of the command-line driver; each maps to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    /// Scenario file missing or unreadable.
    #[error("cannot read input: {0}")]
    Input(String),
    #[error("config parse error: {0}")]
    Parse(String),
    /// Well-formed input describing an impossible scenario.
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("{0}")]
    Numeric(String),
    #[error("QoS target cannot be met: {0}")]
    Infeasible(String),
    #[error("output error: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    /// 0 ok, 1 numeric failure, 2 infeasible, 64 usage; the input errors
    /// follow sysexits.h.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Usage(_) => 64,
            CliError::Parse(_) => 65,
            CliError::Input(_) => 66,
            CliError::Output(_) => 74,
            CliError::Invalid(_) => 78,
        }
    }
}

impl From<ostn_core::Error> for CliError {
    fn from(e: ostn_core::Error) -> Self {
        match e {
            ostn_core::Error::Numeric { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
