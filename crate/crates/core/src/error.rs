use faer::c64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("incompatible grids: {0}")]
    GridMismatch(String),

    #[error("stability function evaluated at its pole z = {0}")]
    Singularity(c64),

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }

    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter(_) | Error::GridMismatch(_) => 1,
            Error::Io(_) => 3,
            _ => 2,
        }
    }
}
