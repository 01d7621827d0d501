use std::path::Path;

use thiserror::Error;

/// Exit status classes.
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_GENERATION: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, manifests, or input files.
    #[error("configuration error: {0}")]
    Config(String),
    /// A level generator gave up.
    #[error("generation error: {0}")]
    Generation(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Generation(_) => EXIT_GENERATION,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Attributes a failure to reading or parsing `path`.
    pub fn input(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Config(format!("{}: {err}", path.display()))
    }

    pub fn output(path: &Path, err: impl std::fmt::Display) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }
}

impl From<popgrid::Error> for CliError {
    fn from(e: popgrid::Error) -> Self {
        use popgrid::Error as E;
        match e {
            E::Config(m) => CliError::Config(m),
            // Domain errors come from out-of-range arguments such as an
            // empty level set or a zero sample count.
            E::Domain(m) => CliError::Config(m),
            E::Parse { .. } => CliError::Config(e.to_string()),
            E::Generation { .. } => CliError::Generation(e.to_string()),
            E::Io(_) | E::Json(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<popgrid_stats::StatsError> for CliError {
    fn from(e: popgrid_stats::StatsError) -> Self {
        match e {
            popgrid_stats::StatsError::Domain(m) => CliError::Config(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
