use std::fmt;
use std::io;

use ans_core::AnsError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(io::Error),
    Ans(AnsError),
}

impl CliError {
    /// 1 usage, 2 format or corruption, 3 budget exceeded.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Ans(AnsError::BudgetExceeded { .. }) => 3,
            CliError::Ans(e) if e.is_corruption() || matches!(e, AnsError::OutputLimit { .. }) => 2,
            CliError::Ans(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Ans(e) => write!(f, "{e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<AnsError> for CliError {
    fn from(e: AnsError) -> Self {
        CliError::Ans(e)
    }
}
