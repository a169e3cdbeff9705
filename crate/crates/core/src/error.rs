use thiserror::Error;

/// Errors raised by the construction and verification layers.
///
/// Mathematical check *failures* are not errors: they are recorded in a
/// [`VerificationReport`](crate::analysis::VerificationReport). Errors signal
/// misuse, violated preconditions, or broken internal consistency.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller asked for something that does not make sense for the inputs
    /// (wrong field order, mixed fields, unsupported parameter).
    #[error("usage error: {0}")]
    Usage(String),

    /// An operation was applied outside its mathematical domain
    /// (inverse of zero, projecting from a point of the centre, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition of a construction does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A plane section that is neither a singleton nor an oval was met while
    /// decomposing a quadratic set.
    #[error("plane {plane} is neither of type (S) nor (C): {detail}")]
    Classification { plane: usize, detail: String },

    /// A closed-form count or structural invariant of an internal object
    /// failed. This always indicates a bug.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// The point set produced by a parameter is not an elliptic quadric.
    #[error("parameter does not yield an ovoid: {0}")]
    NotOvoid(String),

    /// The kernel span has the wrong dimension for ovoid recovery.
    #[error("ovoid not recoverable: kernel span has projective dimension {0}")]
    NotRecoverable(isize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! consistency {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::Consistency(format!($($arg)+)));
        }
    };
}
pub(crate) use consistency;
