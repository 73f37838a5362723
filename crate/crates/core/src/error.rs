use thiserror::Error;

/// Failures reported by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not positive definite (failing pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("representation violated: g(x, mu) = {value} is not negative")]
    RepresentationViolated { value: f64 },

    #[error("no sign change on the bracket: function is {sign} throughout")]
    NoSignChange { sign: Sign },

    #[error("function oscillates on the bracket ({changes} sign changes)")]
    Oscillation { changes: usize },

    #[error("bracket failure: {0}")]
    BracketFailure(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported marginal kind for this operation: {0}")]
    UnsupportedKind(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("certificate failed: {0}")]
    Certification(String),

    #[error("critical point {point} of the transform derivative is not strictly separated from the bracket")]
    CriticalPoint { point: f64 },
}

/// Sign of a function that keeps one sign on a bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Positive,
    Negative,
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Positive => write!(f, "positive"),
            Sign::Negative => write!(f, "negative"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
