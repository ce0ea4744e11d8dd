use std::path::{Path, PathBuf};

use thiserror::Error;

/// Failures of the runner and the file formats. Each maps to a distinct
/// process exit code.
#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] waveleton_core::Error),
    /// Scenario text that does not parse; the message names line and field.
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("checksum mismatch in {0}")]
    Checksum(PathBuf),
    #[error("snapshot {index} is missing ({file})")]
    MissingSnapshot { index: usize, file: PathBuf },
    #[error("malformed file {file}: {detail}")]
    Format { file: PathBuf, detail: String },
}

pub type RunResult<T> = std::result::Result<T, RunError>;

impl RunError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io { path: path.to_path_buf(), source }
    }

    pub fn format(file: &Path, detail: impl Into<String>) -> Self {
        RunError::Format { file: file.to_path_buf(), detail: detail.into() }
    }

    /// Machine-readable category, printed with every CLI error.
    pub fn category(&self) -> &'static str {
        use waveleton_core::Error as E;
        match self {
            RunError::Core(E::Config(_) | E::Argument(_) | E::Resolution(_)) | RunError::Parse(_) => "config",
            RunError::Core(E::Cfl(_)) => "cfl",
            RunError::Core(E::Instability { .. }) => "instability",
            RunError::Core(E::Dimension(_)) => "dimension",
            RunError::Core(E::Unsupported(_)) => "unsupported",
            RunError::Checksum(_) | RunError::MissingSnapshot { .. } | RunError::Format { .. } => "checksum",
            RunError::Io { .. } => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "cfl" => 3,
            "instability" => 4,
            "dimension" => 5,
            "checksum" => 6,
            "unsupported" => 7,
            _ => 1,
        }
    }
}
