use thiserror::Error;

/// Errors raised anywhere in the benchmarking pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("instance generation failed after {attempts} candidates: {last_reason}")]
    GenerationFailure { attempts: usize, last_reason: String },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("routing failed: {0}")]
    Routing(String),

    #[error("readout mitigation failed: {0}")]
    Mitigation(String),

    #[error("QAOA run failed: {0}")]
    Run(String),

    #[error("{failed} of {total} runs failed, exceeding the failure budget")]
    RunBudget { failed: usize, total: usize },

    #[error("scoring context mismatch: {0}")]
    ScoringContext(String),

    #[error("nothing to report: {0}")]
    NothingToReport(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub(crate) fn json(path: impl AsRef<std::path::Path>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
