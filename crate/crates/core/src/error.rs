use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the pipeline crates.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// A malformed N-Triples line. Only surfaced as an error in strict mode;
    /// otherwise malformed lines are recorded in the parse stats.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("unknown dataset kind `{0}`")]
    UnknownDatasetKind(String),

    #[error("unknown language code `{0}`")]
    UnknownLanguage(String),

    #[error("unknown root category `{0}`")]
    UnknownRootCategory(String),

    #[error("occupation matching requires at least one include term")]
    EmptyIncludeTerms,

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error("snapshot version mismatch: found {found}, expected {expected}")]
    SnapshotVersion { found: u32, expected: u32 },

    #[error("configuration error: {0}")]
    Config(String),

    /// All validation problems reported at once, one per line.
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    ConfigValidation(Vec<String>),

    #[error("stage `{stage}` requires outputs of stage `{dependency}`; run it first")]
    MissingStageOutput {
        stage: &'static str,
        dependency: &'static str,
    },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("canon list is empty")]
    EmptyCanon,

    #[error("ranking is empty")]
    EmptyRanking,

    #[error("score vectors must have equal length ≥ 2 (got {a} and {b})")]
    BadVectorLength { a: usize, b: usize },

    #[error("curve has no mass to normalize")]
    ZeroCurve,

    #[error("unknown export format `{0}`")]
    UnknownFormat(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
