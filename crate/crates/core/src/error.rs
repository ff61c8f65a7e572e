use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: expected {expected} values, got {got}")]
    GridMismatch { expected: usize, got: usize },

    #[error("profile Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("profile iterate left the positive cone (damping floor reached at iteration {iteration})")]
    NonPositivity { iteration: usize },

    #[error("reaction Newton failed at node {node} (residual {residual:e})")]
    NewtonFailure { node: usize, residual: f64 },

    #[error("positivity lost at node {node} (value {value:e})")]
    PositivityLoss { node: usize, value: f64 },

    #[error("entropy with p = {p} is only supported for alpha = beta")]
    UnsupportedEntropy { p: f64 },

    #[error("theta = {theta} >= 1/2: no certificate for alpha > beta")]
    ThetaTooLarge { theta: f64 },

    #[error("no certificate for this regime: {0}")]
    UnsupportedRegime(String),

    #[error("empty curve")]
    EmptyCurve,

    #[error("parse error at line {line} ({key}): {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl Error {
    /// Variant name, for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "Domain",
            Error::GridMismatch { .. } => "GridMismatch",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::NonPositivity { .. } => "NonPositivity",
            Error::NewtonFailure { .. } => "NewtonFailure",
            Error::PositivityLoss { .. } => "PositivityLoss",
            Error::UnsupportedEntropy { .. } => "UnsupportedEntropy",
            Error::ThetaTooLarge { .. } => "ThetaTooLarge",
            Error::UnsupportedRegime(_) => "UnsupportedRegime",
            Error::EmptyCurve => "EmptyCurve",
            Error::Parse { .. } => "Parse",
            Error::Io(_) => "Io",
        }
    }

    /// Failures of a numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::NonPositivity { .. } | Error::NewtonFailure { .. } | Error::PositivityLoss { .. }
        )
    }
}
