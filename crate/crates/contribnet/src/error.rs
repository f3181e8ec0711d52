use std::io;
use std::path::PathBuf;

use contribnet_core::metrics::MetricsError;
use contribnet_core::nullmodel::NullModelError;
use contribnet_core::statement::LexiconError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("malformed markup at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },

    #[error("lexicon: {0}")]
    LexiconRules(#[from] LexiconError),

    /// Inputs produced under a different lexicon than the one supplied.
    #[error("lexicon fingerprint mismatch: data was parsed with {found}, expected {expected}")]
    ConfigMismatch { expected: String, found: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("null model: {0}")]
    Null(#[from] NullModelError),

    #[error("metrics: {0}")]
    Metrics(#[from] MetricsError),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 for bad input or configuration caught up front,
    /// 2 for a failure while a stage was running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Lexicon { .. }
            | Error::LexiconRules(_)
            | Error::ConfigMismatch { .. } => 1,
            _ => 2,
        }
    }
}
