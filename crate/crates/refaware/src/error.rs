use refaware_core::align::AlignError;
use serde_json::json;

/// Every failure the service reports, with a stable machine-readable code.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("revision not found: {0}")]
    RevisionNotFound(String),
    #[error("file not found: {path} at {rev}")]
    FileNotFound { rev: String, path: String },
    #[error("the change set contains no commits")]
    EmptyChangeSet,
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid document at `{path}`: {message}")]
    Validation { path: String, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("git: {0}")]
    Git(String),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Error::RevisionNotFound(_) => "REVISION_NOT_FOUND",
            Error::FileNotFound { .. } => "FILE_NOT_FOUND",
            Error::EmptyChangeSet => "EMPTY_CHANGE_SET",
            Error::NotFound(_) => "NOT_FOUND",
            Error::Validation { .. } => "VALIDATION_ERROR",
            Error::Config(_) => "CONFIG_ERROR",
            Error::Git(_) => "GIT_ERROR",
            Error::Align(_) => "MISSING_BODY",
            Error::Io(_) => "IO_ERROR",
        }
    }

    /// `{"error": {"code", "message", "path"?}}`
    pub fn document(&self) -> serde_json::Value {
        let mut body = json!({ "code": self.code(), "message": self.to_string() });
        if let Error::Validation { path, .. } = self {
            body["path"] = json!(path);
        }
        json!({ "error": body })
    }
}

impl From<refaware_core::revision::RevisionError> for Error {
    fn from(e: refaware_core::revision::RevisionError) -> Self {
        match e {
            refaware_core::revision::RevisionError::EmptyChangeSet => Error::EmptyChangeSet,
        }
    }
}
