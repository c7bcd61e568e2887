use std::path::PathBuf;

use serde_json::json;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("schema: {0}")]
    Schema(String),
    #[error("{}", match .line { Some(l) => format!("line {l}: {message}"), None => message.clone() })]
    Validation { line: Option<usize>, message: String },
    #[error("estimation failed: {0}")]
    Estimation(#[from] hdi_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self::Validation { line: None, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Parse { .. } => "parse",
            Self::Schema(_) => "schema",
            Self::Validation { .. } => "validation",
            Self::Estimation(_) => "estimation",
            Self::Io { .. } => "io",
            Self::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Parse { .. } | Self::Schema(_) => 3,
            Self::Validation { .. } => 4,
            Self::Estimation(_) => 5,
            Self::Io { .. } => 6,
        }
    }

    /// One-line JSON object for stderr.
    pub fn to_json(&self) -> String {
        let line = match self {
            Self::Parse { line, .. } => Some(*line),
            Self::Validation { line, .. } => *line,
            _ => None,
        };
        let mut err = json!({ "kind": self.kind(), "message": self.to_string() });
        if let Some(line) = line {
            err["line"] = json!(line);
        }
        json!({ "error": err }).to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
