use std::path::PathBuf;

/// Failures of a lab run, each mapped to a process exit status.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver failed: {0}")]
    Solve(membrane_core::Error),
    /// A diagnostic did not complete or flagged a fatal violation.
    #[error("diagnostics failed: {0}")]
    Diagnostics(String),
    /// The sweep reference has a one-phase singular free-boundary point.
    #[error("sweep hypothesis violated: one-phase singular point at ({x}, {y})")]
    Hypothesis { x: f64, y: f64 },
    #[error("{0}")]
    Numerics(membrane_core::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Io { .. } => 1,
            LabError::Config(_) => 2,
            LabError::Solve(_) => 3,
            LabError::Diagnostics(_) | LabError::Numerics(_) => 4,
            LabError::Hypothesis { .. } => 5,
        }
    }
}

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> LabError + '_ {
    move |source| LabError::Io {
        path: path.to_path_buf(),
        source,
    }
}
