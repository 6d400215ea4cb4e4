use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller broke an operation's precondition (wrong action kind, stale cache, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input data is malformed or out of the accepted range.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The external detector answered with something we cannot use.
    #[error("detector protocol error: {0}")]
    Protocol(String),

    #[error("detector transport error: {0}")]
    Transport(String),

    #[error("training error: {0}")]
    Training(String),

    #[error("weight file {path}: {reason}")]
    WeightFile { path: PathBuf, reason: String },

    #[error("image format error: {0}")]
    ImageFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Self::Contract(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }
}
