use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("mode {mode} out of range for a {modes}-mode chain")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid pulse at t = {t:.6e} s: {reason}")]
    InvalidPulse { t: f64, reason: String },

    #[error("infeasible pulse: {0}")]
    InfeasiblePulse(String),

    #[error("trap stability violated: {0}")]
    Stability(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("propagation failed: {0}")]
    Propagation(String),

    #[error("population {population:.3e} reached the Fock cutoff (limit {limit:.1e})")]
    Leakage { population: f64, limit: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn in_scenario(self, scenario: &str) -> Self {
        Error::Scenario {
            scenario: scenario.to_string(),
            source: Box::new(self),
        }
    }
}
