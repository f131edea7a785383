use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent architecture or hyperparameters.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch in {layer}: {detail}")]
    Shape { layer: String, detail: String },

    #[error("index {index} out of range for table with {size} rows")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("empty segment: {0}")]
    EmptySegment(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("gradient check failed: {0}")]
    GradCheck(String),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("corpus error: {0}")]
    Corpus(String),

    #[error("split manifest error: {0}")]
    Manifest(String),

    #[error("embedding file error: {0}")]
    Embedding(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn shape(layer: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Shape {
            layer: layer.into(),
            detail: detail.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// The message without the category prefix of `Display`, for use next
    /// to [`Error::kind`].
    pub fn message(&self) -> String {
        match self {
            Error::Config(m)
            | Error::EmptySegment(m)
            | Error::NonFinite(m)
            | Error::GradCheck(m)
            | Error::Corpus(m)
            | Error::Manifest(m)
            | Error::Embedding(m)
            | Error::Checkpoint(m) => m.clone(),
            Error::Io { path, source } => format!("{}: {source}", path.display()),
            other => other.to_string(),
        }
    }

    /// Stable short identifier, used in machine-readable CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Shape { .. } => "shape",
            Error::IndexOutOfRange { .. } => "index",
            Error::EmptySegment(_) => "empty_segment",
            Error::NonFinite(_) => "non_finite",
            Error::GradCheck(_) => "gradcheck",
            Error::Parse { .. } => "parse",
            Error::Corpus(_) => "corpus",
            Error::Manifest(_) => "manifest",
            Error::Embedding(_) => "embedding",
            Error::Checkpoint(_) => "checkpoint",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Toml(_) => "toml",
            Error::Csv(_) => "csv",
        }
    }
}
