use std::fmt;

/// Which resource cap was hit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitKind {
    ClosureSize { limit: usize },
    SubsetsPerStage { limit: u64, needed: u64 },
    Carrier { limit: usize, needed: u64 },
    Deadline,
}

impl fmt::Display for LimitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LimitKind::ClosureSize { limit } => write!(f, "closure grew beyond {limit} elements"),
            LimitKind::SubsetsPerStage { limit, needed } => {
                write!(f, "kappa enumeration needs {needed} subsets in one stage, limit is {limit}")
            }
            LimitKind::Carrier { limit, needed } => {
                write!(f, "carrier of size {needed} exceeds the supported maximum {limit}")
            }
            LimitKind::Deadline => write!(f, "wall-clock budget exhausted"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid algebra document: {0}")]
    Document(String),
    #[error("missing kappa entry for {{{0}}}")]
    MissingKappa(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("exhaustive axiom check refused: carrier has {size} elements, limit is {limit}")]
    TooLargeForExhaustive { size: usize, limit: usize },
    #[error("resource limit exceeded: {kind}{}", context.as_ref().map(|c| format!(" (while compiling `{c}`)")).unwrap_or_default())]
    Limit { kind: LimitKind, context: Option<String> },
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("formula has free variables: {0}")]
    FreeVariables(String),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn limit(kind: LimitKind) -> Self {
        Error::Limit { kind, context: None }
    }

    pub fn is_limit(&self) -> bool {
        matches!(self, Error::Limit { .. })
    }

    /// Attach the subformula being compiled, keeping the innermost one.
    pub fn in_context(self, ctx: impl FnOnce() -> String) -> Self {
        match self {
            Error::Limit { kind, context: None } => Error::Limit { kind, context: Some(ctx()) },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
