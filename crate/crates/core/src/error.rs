use std::path::PathBuf;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A row of an input file could not be accepted.
    #[error("{}: line {line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("unknown node id {id} ({context})")]
    UnknownNode { id: NodeId, context: String },

    #[error("duplicate node id {id} ({context})")]
    DuplicateNode { id: NodeId, context: String },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input for which the requested quantity is undefined (constant series,
    /// empty samples, all-zero rasters).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn param(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
