use thiserror::Error;

/// Errors raised by the margin toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    Input(String),

    /// Input is well formed but the operation is undefined on it
    /// (zero vector, single-point space, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iterative solver stopped without reaching its tolerance.
    #[error("solver failure after {iterations} iterations: {message} (best value {best_value}, gap {gap})")]
    SolverFailure { message: String, iterations: usize, best_value: f64, gap: f64 },

    /// Reading or writing an external file failed.
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(format!("json: {e}"))
    }
}
