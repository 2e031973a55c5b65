use std::path::{Path, PathBuf};

use icc_core::baselines::BaselineError;
use icc_core::icc::IccError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    #[error("{0}")]
    Compute(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Compute(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    /// Single-line `key=value` form for stderr.
    pub fn reason_line(&self) -> String {
        let one_line = |s: String| s.replace(['\n', '\r'], " ");
        match self {
            CliError::Validation { field, message } => {
                format!(
                    "error kind=validation field={field} reason={:?}",
                    one_line(message.clone())
                )
            }
            CliError::Compute(m) => {
                format!("error kind=computation reason={:?}", one_line(m.clone()))
            }
            CliError::Io { path, source } => format!(
                "error kind=io path={:?} reason={:?}",
                path.display().to_string(),
                one_line(source.to_string())
            ),
        }
    }
}

impl From<IccError> for CliError {
    fn from(e: IccError) -> Self {
        match e {
            IccError::InvalidParams(m) => CliError::validation("channel", m),
            IccError::InvalidConfig(m) => CliError::validation("sweep", m),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::Channel(inner) => inner.into(),
            BaselineError::InvalidGrid(r) => {
                CliError::validation("baseline_resolution", format!("{r} is below 2"))
            }
            other => CliError::Compute(other.to_string()),
        }
    }
}
