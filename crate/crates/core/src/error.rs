use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {encoding} input at byte offset {offset}")]
    Decode { encoding: &'static str, offset: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate multiplicity {multiplicity}")]
    DuplicateMultiplicity { line: usize, multiplicity: u64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "degree floor(c0 * ln k) is zero for k = {k}, c0 = {c0}; \
         the polynomial correction is empty, use the plug-in estimator"
    )]
    DegenerateDegree { k: f64, c0: f64 },

    #[error(
        "degenerate interval [l, r] = [{l}, {r}]; for n >= c1 * k * ln k the sample is in \
         the plug-in regime"
    )]
    DegenerateInterval { l: f64, r: f64 },

    #[error("{estimator} is undefined: {reason}")]
    Undefined {
        estimator: &'static str,
        reason: String,
    },

    #[error("fingerprint has a censored tail above multiplicity {above}; {estimator} needs exact multiplicities")]
    Censored { estimator: &'static str, above: u64 },

    #[error("solver did not converge after {iterations} iterations: {detail}")]
    NonConvergence { iterations: usize, detail: String },

    #[error("singular linear system (condition number estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable tag, used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Decode { .. } => "decode",
            Error::Parse { .. } => "parse",
            Error::DuplicateMultiplicity { .. } => "format",
            Error::EmptyInput(_) => "empty_input",
            Error::InvalidParameter(_) => "parameter",
            Error::Precondition(_) => "precondition",
            Error::DegenerateDegree { .. } => "degenerate_degree",
            Error::DegenerateInterval { .. } => "degenerate_interval",
            Error::Undefined { .. } => "undefined_estimator",
            Error::Censored { .. } => "censored_fingerprint",
            Error::NonConvergence { .. } => "solver",
            Error::Singular { .. } => "singular_system",
            Error::Precision(_) => "precision",
            Error::Internal(_) => "internal",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
