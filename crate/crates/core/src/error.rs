use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Bounded-search failures are kept apart from mathematical preconditions:
/// running out of budget never means "no".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at position {position}: unexpected character {character:?}")]
    Parse { character: char, position: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("the identity has no axis")]
    NoAxis,

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("bounded search exhausted: {what} (searched to {searched_to})")]
    BoundedSearch { what: String, searched_to: usize },
}

impl Error {
    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn bounded(what: impl Into<String>, searched_to: usize) -> Self {
        Error::BoundedSearch {
            what: what.into(),
            searched_to,
        }
    }

    /// True for budget exhaustion, which callers must not read as a negative answer.
    pub fn is_bounded_search(&self) -> bool {
        matches!(self, Error::BoundedSearch { .. })
    }
}
