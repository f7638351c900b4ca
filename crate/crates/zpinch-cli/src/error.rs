//! Errors of the study driver and their exit codes.

use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Process exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status when a numerical stage failed to converge.
pub const EXIT_NONCONVERGED: i32 = 3;
/// Exit status when some stages failed but other results were written.
pub const EXIT_PARTIAL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: String,
        #[source]
        source: zpinch::Error,
    },

    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn stage(stage: impl Into<String>, source: zpinch::Error) -> Self {
        CliError::Stage {
            stage: stage.into(),
            source,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit status for a fatal error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Stage { source, .. } if is_nonconvergence(source) => EXIT_NONCONVERGED,
            _ => EXIT_PARTIAL,
        }
    }
}

/// Errors that signal numerical non-convergence rather than bad input.
pub fn is_nonconvergence(e: &zpinch::Error) -> bool {
    matches!(
        e,
        zpinch::Error::NonConvergedGrid { .. }
            | zpinch::Error::SolverStall { .. }
            | zpinch::Error::AxisSingularity(_)
            | zpinch::Error::StabilityViolation(_)
            | zpinch::Error::InsufficientGrowth { .. }
    )
}
