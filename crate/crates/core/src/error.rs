use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus contains no tokens")]
    EmptyCorpus,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("taxonomy contains a self-edge on `{0}`")]
    SelfEdge(String),

    #[error("taxonomy contains a cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("precision matrix of {0} is not positive-definite")]
    NotPositiveDefinite(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(&'static str),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("bad file format: {0}")]
    Format(String),

    #[error("not a {0} file")]
    BadMagic(&'static str),

    #[error("unsupported {what} version {found} (this build reads version {supported})")]
    UnsupportedVersion {
        what: &'static str,
        found: u32,
        supported: u32,
    },

    #[error("unexpected end of file while reading {0}")]
    Truncated(&'static str),

    #[error("unknown word `{0}`")]
    UnknownWord(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
