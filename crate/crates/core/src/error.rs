use std::path::PathBuf;

use crate::graph::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid hierarchy: {0}")]
    Hierarchy(String),

    #[error("validation failed: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("unknown hierarchy element `{0}`")]
    UnknownElement(String),

    #[error("unknown layer `{0}`")]
    UnknownLayer(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("node {node} has no neighbors in layer `{layer}`")]
    IsolatedNode { layer: String, node: String },

    #[error("non-finite value in `{element}` after {stage}")]
    NonFinite { element: String, stage: String },

    #[error("embedding tables disagree on dimension: expected {expected}, found {found} in `{element}`")]
    DimensionMismatch {
        element: String,
        expected: usize,
        found: usize,
    },

    #[error("classifier needs both classes, got {positives} positives and {negatives} negatives")]
    SingleClass { positives: usize, negatives: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
