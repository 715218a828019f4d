use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("missing input file {0}")]
    MissingFile(PathBuf),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Data {
        path: PathBuf,
        #[source]
        source: bowtie_core::Error,
    },

    #[error(transparent)]
    Core(#[from] bowtie_core::Error),

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("checkpoint {path}: unsupported format (magic {magic:?}, version {version})")]
    CheckpointVersion { path: PathBuf, magic: String, version: u32 },

    #[error("checkpoint {path}: {message}")]
    CheckpointCorrupt { path: PathBuf, message: String },

    #[error("vocabulary fingerprint mismatch: checkpoint expects {expected}, data has {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("verdict failed: {0}")]
    Verdict(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        let path = path.into();
        if source.kind() == io::ErrorKind::NotFound {
            Error::MissingFile(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, source: bowtie_core::Error) -> Self {
        Error::Data {
            path: path.into(),
            source,
        }
    }

    /// 1 usage, 2 data, 3 numerical divergence, 4 failed verdict.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Verdict(_) => 4,
            Error::Core(e) | Error::Data { source: e, .. } => match e {
                bowtie_core::Error::Diverged { .. }
                | bowtie_core::Error::NonFinite(_)
                | bowtie_core::Error::NoConvergence(_) => 3,
                bowtie_core::Error::InvalidConfig(_) => 1,
                _ => 2,
            },
            _ => 2,
        }
    }

    /// Stable short identifier for the one-line error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::MissingFile(_) => "missing-file",
            Error::Parse { .. } => "parse",
            Error::Data { .. } | Error::Core(_) => match self.exit_code() {
                1 => "config",
                3 => "divergence",
                _ => "data",
            },
            Error::Json { .. } => "json",
            Error::CheckpointVersion { .. } => "checkpoint-version",
            Error::CheckpointCorrupt { .. } => "checkpoint-corrupt",
            Error::FingerprintMismatch { .. } => "fingerprint",
            Error::Usage(_) => "usage",
            Error::Verdict(_) => "verdict",
        }
    }
}
