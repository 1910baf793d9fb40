use thiserror::Error;

pub type Result<T, E = MatroidError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatroidError {
    /// A set was built over a different ground set than the matroid it was passed to.
    #[error("element set is not over the ground set of this matroid")]
    UniverseMismatch,

    #[error("{0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An exhaustive search would exceed its configured size limit.
    #[error("{what}: size {size} exceeds budget {budget}")]
    Capacity {
        what: &'static str,
        size: usize,
        budget: usize,
    },

    /// A guaranteed-to-exist object was not found. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl MatroidError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Self::Precondition(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Self::Invariant(msg.into())
    }

    pub(crate) fn check_budget(what: &'static str, size: usize, budget: usize) -> Result<()> {
        if size > budget {
            Err(Self::Capacity { what, size, budget })
        } else {
            Ok(())
        }
    }
}
