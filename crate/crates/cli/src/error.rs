use rotor_gpe::GpeError;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Gpe(#[from] GpeError),

    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Gpe(GpeError::ConfigInvalid { .. }) => EXIT_CONFIG,
            CliError::Gpe(GpeError::Io { .. }) => EXIT_IO,
            CliError::Gpe(_) => EXIT_RUNTIME,
            CliError::Verification { .. } => EXIT_VERIFY,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
