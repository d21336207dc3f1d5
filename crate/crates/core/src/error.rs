use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A scenario or solution field violates its invariant.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// An operation was called outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The adaptive quadrature did not reach its tolerance within the
    /// subdivision budget.
    #[error(
        "quadrature did not converge: estimate {estimate:e}, error {error:e} > tolerance {tolerance:e} after {intervals} intervals"
    )]
    Quadrature {
        estimate: f64,
        error: f64,
        tolerance: f64,
        intervals: usize,
    },

    /// A bracketing root search found no sign change.
    #[error("no sign change for {what} on [{lo:e}, {hi:e}]")]
    NoSignChange { what: &'static str, lo: f64, hi: f64 },

    /// The secrecy-outage constraint cannot be met.
    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Process exit status: 2 for infeasibility, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        if self.is_infeasibility() { 2 } else { 1 }
    }

    /// True for errors caused by an unsatisfiable optimization problem rather
    /// than by bad input.
    pub fn is_infeasibility(&self) -> bool {
        matches!(
            self,
            Error::Infeasible(_) | Error::NoSignChange { .. } | Error::Quadrature { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
