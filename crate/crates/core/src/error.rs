use thiserror::Error;

/// Errors raised while reading or validating an instance.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid instance ({invariant}): {detail}")]
    Invalid {
        invariant: &'static str,
        detail: String,
    },
}

impl ModelError {
    pub(crate) fn invalid(invariant: &'static str, detail: impl Into<String>) -> Self {
        ModelError::Invalid {
            invariant,
            detail: detail.into(),
        }
    }

    /// Name of the violated invariant, if this is a validation error.
    pub fn invariant(&self) -> Option<&'static str> {
        match self {
            ModelError::Invalid { invariant, .. } => Some(invariant),
            ModelError::Parse { .. } => None,
        }
    }
}

/// Errors shared by the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("resource limit exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u64,
        budget: u64,
    },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl SolveError {
    pub(crate) fn budget(what: &'static str, needed: u64, budget: u64) -> Self {
        SolveError::Budget {
            what,
            needed,
            budget,
        }
    }
}
