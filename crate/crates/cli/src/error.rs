use std::path::Path;

use ncfun_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid input: {0}")]
    Format(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    /// A check ran to completion and reported failure.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// The documented exit code: 1 failed check, 2 input or usage error,
    /// 3 domain violation, 4 numeric failure, 5 extraction failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Parse { .. }
            | CliError::Io { .. }
            | CliError::Format(_)
            | CliError::Config(_)
            | CliError::Usage(_) => 2,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

fn core_exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::DomainViolation { .. } => 3,
        CoreError::SingularMatrix { .. }
        | CoreError::NonConvergence { .. }
        | CoreError::ResolventSingular
        | CoreError::StructureViolation { .. }
        | CoreError::SamplerStarvation { .. } => 4,
        CoreError::NonScalarResult { .. } => 5,
        CoreError::Extraction { source, .. } => match source.as_ref() {
            CoreError::DomainViolation { .. } => 3,
            _ => 5,
        },
        _ => 2,
    }
}
