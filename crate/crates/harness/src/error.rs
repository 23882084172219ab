use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("config line {line}: {message}")]
    ConfigSyntax { line: usize, message: String },

    #[error(transparent)]
    Core(#[from] tcps_core::Error),

    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),

    /// A resource cross-check did not hold.
    #[error("check failed: {0}")]
    Check(String),
}

impl HarnessError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        HarnessError::Config { key: key.to_string(), message: message.into() }
    }

    /// 2 for anything the caller got wrong, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) | HarnessError::Config { .. } | HarnessError::ConfigSyntax { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
