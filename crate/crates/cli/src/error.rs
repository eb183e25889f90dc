use std::path::Path;

use tenk_core::{Error as CoreError, ErrorKind};

/// Failure of one CLI invocation, carrying the module it came from.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(CoreError),
    Data {
        module: &'static str,
        message: String,
    },
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn data(module: &'static str, message: impl Into<String>) -> Self {
        CliError::Data {
            module,
            message: message.into(),
        }
    }

    pub fn io(module: &'static str, path: &Path, e: std::io::Error) -> Self {
        Self::data(module, format!("{}: {e}", path.display()))
    }

    pub fn module(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "cli",
            CliError::Core(e) => e.module(),
            CliError::Data { module, .. } => module,
        }
    }

    /// 1 usage, 2 data, 3 computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data { .. } => 2,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Data => 2,
                ErrorKind::Computation => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Data { module, message } => write!(f, "{module}: {message}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

macro_rules! from_module_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}

from_module_error!(
    tenk_core::corpus::CorpusError,
    tenk_core::textscore::ScoreError,
    tenk_core::index::IndexError,
    tenk_core::eventstudy::EventStudyError,
    tenk_core::regress::RegressError,
    tenk_core::perf::PerfError
);
