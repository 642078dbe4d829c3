use std::path::PathBuf;

/// Errors from configuration, file IO and the core library.
#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}, row {row}: {reason}")]
    BadRecord { path: PathBuf, row: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] hdpath_core::Error),
}

impl PipelineError {
    /// Process exit status: 2 for invalid input, 3 for a failed compiler
    /// check, 4 for missing measurement settings, 1 for IO.
    pub fn exit_code(&self) -> i32 {
        use hdpath_core::Error as E;
        match self {
            PipelineError::Io { .. } => 1,
            PipelineError::Core(E::Miscompiled { .. }) => 3,
            PipelineError::Core(E::IncompleteData { .. }) => 4,
            _ => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| PipelineError::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Self {
        let path = path.into();
        move |source| PipelineError::Csv { path, source }
    }

    pub(crate) fn json(path: impl Into<PathBuf>) -> impl FnOnce(serde_json::Error) -> Self {
        let path = path.into();
        move |source| PipelineError::Json { path, source }
    }
}

pub type Result<T> = std::result::Result<T, PipelineError>;
