use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("exact homogeneity scan refused: N*d = {work} exceeds limit {limit}; use the conservative method")]
    WorkLimitExceeded { work: usize, limit: usize },

    #[error("evaluation is singular at this point: {0}")]
    Singular(String),

    #[error("duplicate point at indices {first} and {second}")]
    DuplicatePoint { first: usize, second: usize },

    #[error("quadrature did not converge: last change {last_change:e} with {points} points")]
    QuadratureFailed { last_change: f64, points: usize },

    #[error("point set parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("homogeneity check failed for N = {n}: {detail}")]
    HomogeneityFailed { n: usize, detail: String },

    #[error("engine mismatch at N = {n}: brute = {brute}, grid = {grid}")]
    EngineMismatch { n: usize, brute: u64, grid: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
