use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed instance data: mismatched ground sets, out-of-range elements,
    /// invalid matrices, oracles violating normalization or positivity.
    #[error("invalid instance: {0}")]
    Instance(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("search exhausted after {probes} probes (cap {cap})")]
    SearchExhausted { probes: usize, cap: usize },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn instance(msg: impl Into<String>) -> Self {
        Error::Instance(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible(_))
    }
}
