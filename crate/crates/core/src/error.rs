use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A candidate, round or restart cap was hit before the solver finished.
    #[error("budget exceeded after {candidates} candidates and {rounds} rounds")]
    BudgetExceeded { candidates: u64, rounds: u32 },

    /// Some factor-base prime has no logarithm to the chosen base, so index
    /// calculus cannot complete its table.
    #[error("no discrete logarithm of {prime} exists to base {base}")]
    GeneralityFailure { base: u64, prime: u64 },

    #[error("target is not in the subgroup generated by the base")]
    NoSolution,

    #[error("integer of {bits} bits is above the supported ceiling of {ceiling} bits")]
    SizeCeiling { bits: u32, ceiling: u32 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
