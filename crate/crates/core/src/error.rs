use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("incompatible units: cannot convert {from} to {to}")]
    IncompatibleUnits { from: String, to: String },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("unknown unit `{token}`; accepted units: {accepted}")]
    UnknownUnit { token: String, accepted: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("`{name}` not found in catalog")]
    NotFound { name: String },

    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (estimate {estimate:e}, error estimate {error_estimate:e})"
    )]
    NonConvergence {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("spectrum line {line}: {message}")]
    Spectrum { line: u64, message: String },

    #[error("scenario: {path}: {message}")]
    Scenario { path: String, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
