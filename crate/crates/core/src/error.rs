use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the solvers.
///
/// User indices carried by variants are zero-based; `Display` prints them
/// one-based to match the "User 1, User 2, ..." convention of reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameter {field}: {reason}")]
    InvalidParameter { field: String, reason: String },

    #[error("operation requires a {expected} game")]
    WrongFamily { expected: &'static str },

    #[error("singular or near-singular linear system (pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },

    #[error(
        "{kind} action of user {} is {value} which lies outside its bounds [{lower}, {upper}]",
        .user + 1
    )]
    OutOfBounds {
        kind: &'static str,
        user: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("weight of user {} is zero; exclude that user from the game", .user + 1)]
    ZeroWeight { user: usize },

    #[error("target action of user {} is not admissible: {reason}", .user + 1)]
    InvalidTarget { user: usize, reason: String },

    #[error("assumption sampling region is empty: {0}")]
    EmptySamplingRegion(String),

    #[error("invalid dynamics configuration: {0}")]
    InvalidConfig(String),

    #[error("{what}: closed form gives {closed_form} but direct evaluation gives {evaluated}")]
    Inconsistent {
        what: &'static str,
        closed_form: f64,
        evaluated: f64,
    },
}

impl Error {
    pub(crate) fn param(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for failures of the solvers themselves (as opposed to malformed input).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::OutOfBounds { .. } | Error::Inconsistent { .. }
        )
    }
}
