use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("all weights are zero")]
    ZeroMass,

    #[error("direction is not a unit vector (norm {0})")]
    NonUnitDirection(f64),

    #[error("problem size {size} exceeds cap {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
