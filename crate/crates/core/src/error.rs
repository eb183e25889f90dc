use std::path::PathBuf;

use thiserror::Error;

/// Broad failure category, used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad or missing input data.
    Data,
    /// A numerical procedure could not produce a result.
    Computation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus: {0}")]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error("textscore: {0}")]
    Score(#[from] crate::textscore::ScoreError),
    #[error("index: {0}")]
    Index(#[from] crate::index::IndexError),
    #[error("eventstudy: {0}")]
    EventStudy(#[from] crate::eventstudy::EventStudyError),
    #[error("regress: {0}")]
    Regress(#[from] crate::regress::RegressError),
    #[error("perf: {0}")]
    Perf(#[from] crate::perf::PerfError),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Name of the module the failure originated in.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Corpus(_) | Error::Io { .. } => "corpus",
            Error::Score(_) => "textscore",
            Error::Index(_) => "index",
            Error::EventStudy(_) => "eventstudy",
            Error::Regress(_) => "regress",
            Error::Perf(_) => "perf",
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Corpus(_) | Error::Io { .. } => ErrorKind::Data,
            Error::Score(e) => e.kind(),
            Error::Index(e) => e.kind(),
            Error::EventStudy(e) => e.kind(),
            Error::Regress(e) => e.kind(),
            Error::Perf(e) => e.kind(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
