use thiserror::Error;

/// Errors raised by the numeric core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid adjuster: {0}")]
    InvalidAdjuster(String),

    #[error("not an SLA: integral of F(y)/y^2 is {integral} > {bound}")]
    NotAnSla { integral: f64, bound: f64 },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tol:e}: estimate {estimate}, error bound {error:e}")]
    Accuracy { estimate: f64, error: f64, tol: f64 },

    #[error("majorant solver did not certify tolerance {tol:e}: residual {residual:e}")]
    GridTooCoarse { residual: f64, tol: f64 },

    #[error("invalid payoff: {0}")]
    InvalidPayoff(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// `true` for errors caused by malformed input files rather than by the mathematics.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Io(_))
    }

    /// Stable snake-case tag for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidMeasure(_) => "invalid_measure",
            Error::InvalidAdjuster(_) => "invalid_adjuster",
            Error::NotAnSla { .. } => "not_an_sla",
            Error::Domain(_) => "domain",
            Error::Accuracy { .. } => "accuracy",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::InvalidPayoff(_) => "invalid_payoff",
            Error::Contract(_) => "contract",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
            _ => Error::Parse(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
