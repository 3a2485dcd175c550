use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its domain (non-positive variance, empty panel, ...).
    #[error("invalid parameter `{name}`: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("operation requires {required} variance mode")]
    VarianceMode { required: &'static str },

    #[error("chain has zero sample variance")]
    ConstantChain,

    #[error("chain of length {len} is too short: need at least {needed} draws")]
    ChainTooShort { len: usize, needed: usize },

    #[error("non-finite value encountered in {what}")]
    NonFinite { what: &'static str },

    #[error("unbalanced panel: unit `{unit}` is missing period {period}")]
    UnbalancedPanel { unit: String, period: i64 },

    #[error("duplicate cell (unit `{unit}`, period {period}) at row {row}")]
    DuplicateCell { unit: String, period: i64, row: usize },

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("covariates are collinear: the cross-product matrix has rank {rank} < {k}")]
    CollinearCovariates { rank: usize, k: usize },

    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{context}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps the error with a human-readable description of where it happened.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping any `Context` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, format!("must be finite, got {value}")))
    }
}
