//! Experiment driver behind the `advq` binary.

pub mod config;
pub mod run;

pub use config::ExperimentConfig;

/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error("numerical contract violation: {0}")]
    Contract(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Capacity(_) => 3,
            CliError::Contract(_) => 4,
        }
    }
}

impl From<advq::Error> for CliError {
    fn from(e: advq::Error) -> Self {
        use advq::Error as E;
        match e {
            E::Capacity { .. } | E::SizeCap { .. } => CliError::Capacity(e.to_string()),
            E::Contract(_) | E::DegenerateProjection(_) => CliError::Contract(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
