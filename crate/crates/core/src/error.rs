use thiserror::Error;

/// Errors produced by the coders, table builders and the container format.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnsError {
    #[error("invalid probability {num}/{den}: must lie strictly between 0 and 1")]
    InvalidProbability { num: u64, den: u64 },

    #[error("invalid stream configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("state overflow: result does not fit in 64 bits")]
    Overflow,

    #[error("digit underflow: stream exhausted while decoding")]
    DigitUnderflow,

    #[error("range I_{symbol} is not contiguous")]
    NonContiguousRange { symbol: usize },

    #[error("range I_{symbol} = {{{lower}..{upper}}} is not b-unique")]
    NotBUnique { symbol: usize, lower: u64, upper: u64 },

    #[error("frequencies sum to {actual}, expected {expected}")]
    FrequencySum { expected: u64, actual: u64 },

    #[error("{distinct} distinct symbols do not fit in {states} states")]
    TooManySymbols { distinct: usize, states: u64 },

    #[error("budget exceeded: {needed} candidates, budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("coders in a multi-table stream must share the same state interval")]
    ConfigMismatch,

    #[error("stationary distribution did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("format error: {0}")]
    Format(String),

    #[error("terminal state mismatch: expected {expected}, found {found}")]
    TerminalState { expected: u64, found: u64 },

    #[error("{0} undecoded digits remain after the last symbol")]
    TrailingDigits(usize),

    #[error("container declares {declared} output bytes, limit is {limit}")]
    OutputLimit { declared: u64, limit: u64 },

    #[error("keyed container requires a key")]
    MissingKey,

    #[error("key supplied for a container that was not keyed")]
    UnexpectedKey,
}

impl AnsError {
    /// True for errors that indicate a corrupt or mismatched container.
    pub fn is_corruption(&self) -> bool {
        matches!(
            self,
            AnsError::DigitUnderflow
                | AnsError::Format(_)
                | AnsError::TerminalState { .. }
                | AnsError::TrailingDigits(_)
                | AnsError::MissingKey
                | AnsError::UnexpectedKey
                | AnsError::FrequencySum { .. }
                | AnsError::InvalidDistribution(_)
        )
    }
}

pub type Result<T, E = AnsError> = std::result::Result<T, E>;
