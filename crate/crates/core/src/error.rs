use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// λ and μ are only defined for positive naturals.
    #[error("{op} is undefined at 0")]
    Zero { op: &'static str },

    #[error("arithmetic overflow in {op}")]
    Overflow { op: &'static str },

    #[error("invalid bit range: {lo} > {hi}")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("sequence is not strictly increasing at index {index}")]
    NotIncreasing { index: usize },

    #[error("sequence too short: need at least {needed}, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("arity must be at least {min}, got {got}")]
    Arity { min: usize, got: usize },

    #[error("expected {expected}, got {got}")]
    Mismatch { expected: String, got: String },

    #[error("colouring is not Z-invariant: {first:?} and {second:?} have equal differences but different colours")]
    NotInvariant { first: Vec<u64>, second: Vec<u64> },

    #[error("enumeration of {count} candidates exceeds the budget of {budget}")]
    Budget { count: u128, budget: u64 },

    #[error("malformed colouring: {0}")]
    Malformed(String),

    #[error("element {0} is enumerated more than once")]
    DuplicateEvent(u64),

    #[error("window exhausted: no element has lambda greater than {query}")]
    WindowExhausted { query: u64 },
}

impl Error {
    /// Stable machine-readable code for the CLI error object.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Zero { .. } => "E_ZERO",
            Error::Overflow { .. } => "E_OVERFLOW",
            Error::InvalidRange { .. } => "E_RANGE",
            Error::NotIncreasing { .. } => "E_NOT_INCREASING",
            Error::TooShort { .. } => "E_TOO_SHORT",
            Error::Arity { .. } => "E_ARITY",
            Error::Mismatch { .. } => "E_MISMATCH",
            Error::NotInvariant { .. } => "E_NOT_INVARIANT",
            Error::Budget { .. } => "E_BUDGET",
            Error::Malformed(_) => "E_MALFORMED",
            Error::DuplicateEvent(_) => "E_DUPLICATE_EVENT",
            Error::WindowExhausted { .. } => "E_WINDOW_EXHAUSTED",
        }
    }
}
