use std::fmt;

use thiserror::Error;

/// Source position inside a mapping definition (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceDiagnostic {
    pub path: String,
    pub location: Location,
    pub token: String,
    pub message: String,
    /// The source line containing `location`.
    pub line: String,
}

impl fmt::Display for SourceDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let SourceDiagnostic { path, location, token, message, line } = self;
        write!(f, "{path}:{location}: {message} (at `{token}`)\n  {line}\n  {:>width$}", "^", width = location.column)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("point {point:?} lies outside the domain")]
    OutsideDomain { point: Vec<f64> },

    #[error("{location}: {message} (at `{token}`)")]
    Parse { location: Location, token: String, message: String },

    /// A parse error in a named source file, with the offending line.
    #[error("{0}")]
    SourceParse(Box<SourceDiagnostic>),

    #[error("point {point:?} is not a fixed point (residual {residual:e})")]
    NotFixed { point: Vec<f64>, residual: f64 },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
