use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid acceptance segment (a={position}, b={lower}, B={upper}): {reason}")]
    InvalidSegment {
        position: f64,
        lower: f64,
        upper: f64,
        reason: &'static str,
    },

    #[error("invalid cultural identity: {0}")]
    InvalidIdentity(String),

    #[error("identities have different worldview counts ({observer} vs {target})")]
    WorldviewMismatch { observer: usize, target: usize },

    #[error("target segment ({lower}, {upper}) contains no grid point")]
    DegenerateTargetSegment { lower: f64, upper: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid prototype {label}: {reason}")]
    InvalidPrototype { label: String, reason: String },

    #[error("group {0} has no agents")]
    EmptyGroup(String),

    #[error("unknown worldview label {0:?}")]
    UnknownWorldview(String),

    #[error("config: {0}")]
    Config(String),

    #[error("malformed data in {path}: {reason}")]
    Data { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
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
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Data {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
