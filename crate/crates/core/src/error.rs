use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by model construction, factorization, inversion and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("theta = {theta} is outside the domain of psi: pole at {boundary} ({side})")]
    Pole {
        theta: f64,
        boundary: f64,
        side: &'static str,
    },

    #[error("no-cramer-root: {0}")]
    NoCramerRoot(String),

    #[error("factorization-failure: {0}")]
    FactorizationFailure(String),

    #[error("divergent-tail: ladder jump pole {pole} does not exceed gamma = {gamma}")]
    DivergentTail { pole: f64, gamma: f64 },

    #[error("oscillation-detected: Stehfest orders disagree by {diff:e} at x = {x}")]
    OscillationDetected { x: f64, diff: f64 },

    #[error("unsupported-model: {0}")]
    UnsupportedModel(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Short machine-readable kind, used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "invalid-model",
            Error::Pole { .. } => "pole",
            Error::NoCramerRoot(_) => "no-cramer-root",
            Error::FactorizationFailure(_) => "factorization-failure",
            Error::DivergentTail { .. } => "divergent-tail",
            Error::OscillationDetected { .. } => "oscillation-detected",
            Error::UnsupportedModel(_) => "unsupported-model",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
