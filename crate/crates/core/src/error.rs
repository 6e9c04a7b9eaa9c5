use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid: {0}")]
    Grid(String),
    #[error("region mismatch: {0}")]
    Region(String),
    #[error("inadmissible potential: {0}")]
    Admissibility(String),
    #[error("boundary: {0}")]
    Boundary(String),
    #[error("solver: {0}")]
    Solver(String),
    #[error("symmetrization: {0}")]
    Symmetrize(String),
    #[error("weights: {0}")]
    Weights(String),
    #[error("carleman: {0}")]
    Carleman(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
