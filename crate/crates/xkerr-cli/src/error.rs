use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Model(#[from] xkerr::Error),

    #[error("{failed} of {total} points failed; first: {first}")]
    PointsFailed { failed: usize, total: usize, first: String },

    #[error("validity gate refused the run: {0} (pass --force to override)")]
    Validity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Model(xkerr::Error::InvalidParameter { .. })
            | CliError::Model(xkerr::Error::InconsistentChargingEnergy { .. }) => 2,
            CliError::Model(_) | CliError::PointsFailed { .. } => 3,
            CliError::Validity(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Model(e) => e.code(),
            CliError::PointsFailed { .. } => "points_failed",
            CliError::Validity(_) => "validity",
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord { kind: self.kind(), exit_code: self.exit_code(), message: self.to_string() }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }
}

/// Machine-readable error printed to stderr and written next to the outputs.
#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
}
