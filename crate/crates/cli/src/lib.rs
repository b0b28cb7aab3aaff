//! Batch pipeline over a road network: ingest, centralities, kernel
//! density rasters, CSR envelopes, rank statistics and node-removal attacks.
//! Every output lands under one directory together with a `manifest.toml`
//! that can replay the run.

pub mod config;
pub mod manifest;
pub mod pipeline;

pub use config::{RunConfig, Stage};
pub use manifest::{replay, Manifest, ReplayReport};
pub use pipeline::{ingest_check, run, RunReport};

/// A failed run, split by exit status: bad configuration or input (2) versus
/// a failure while computing (1).
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Validation(String),
    #[error("stage {stage}: {source:#}")]
    Runtime {
        stage: String,
        #[source]
        source: anyhow::Error,
    },
}

impl Failure {
    pub fn validation(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }

    pub fn runtime(stage: impl Into<String>, source: impl Into<anyhow::Error>) -> Self {
        Failure::Runtime {
            stage: stage.into(),
            source: source.into(),
        }
    }

    pub fn context(self, prefix: impl std::fmt::Display) -> Self {
        match self {
            Failure::Validation(m) => Failure::Validation(format!("{prefix}: {m}")),
            Failure::Runtime { stage, source } => Failure::Runtime {
                stage,
                source: source.context(prefix.to_string()),
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Runtime { .. } => 1,
        }
    }
}
