use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A mark set whose chains order some shared position both ways.
    #[error("infeasible mark set: {0}")]
    Infeasible(String),

    #[error("resource budget `{budget}` exceeded (limit {limit})")]
    Resource { budget: Budget, limit: u64 },

    /// A result that can only come from a bug upstream (negative count,
    /// violated sandwich bound, ...).
    #[error("internal consistency violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Named resource limits, reported verbatim in [`Error::Resource`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    DownsetStates,
    PosetSize,
    IsomorphismSize,
    IsomorphismLeaves,
    OracleLength,
    ClassifyLength,
    MarkSets,
}

impl fmt::Display for Budget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Budget::DownsetStates => "downset-states",
            Budget::PosetSize => "poset-size",
            Budget::IsomorphismSize => "isomorphism-size",
            Budget::IsomorphismLeaves => "isomorphism-leaves",
            Budget::OracleLength => "oracle-length",
            Budget::ClassifyLength => "classify-length",
            Budget::MarkSets => "mark-sets",
        })
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}
