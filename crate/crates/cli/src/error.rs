use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// `validate` ran but at least one assumption failed.
    pub const ASSUMPTION_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: String, message: String },
    #[error(transparent)]
    Core(#[from] lcg_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => exit::CONFIG,
            CliError::Core(e) if e.is_solver_failure() => exit::SOLVER,
            CliError::Core(_) => exit::CONFIG,
            CliError::Io { .. } => exit::IO,
        }
    }
}
