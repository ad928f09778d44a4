use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("SchemaError: {0}")]
    Schema(String),
    #[error("scene {scene}: {source}")]
    Data { scene: String, source: kmo_match::Error },
    #[error("IoError: {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn data(scene: &str, source: kmo_match::Error) -> Self {
        CliError::Data {
            scene: scene.to_string(),
            source,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Schema(_) | CliError::Data { .. } => 3,
            CliError::Io { .. } | CliError::Internal(_) => 4,
        }
    }
}
