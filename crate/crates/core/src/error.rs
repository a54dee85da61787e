use thiserror::Error;

use crate::reduced::{Profile, SolveReport};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("grid too small: {nodes} intervals given, at least {min} required")]
    GridTooSmall { nodes: usize, min: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("solver did not converge: {}", .0.1.summary())]
    NonConvergence(Box<(Profile, SolveReport)>),

    #[error("continuation failed at b2 = {b2}: {source}")]
    ContinuationFailed {
        b2: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("branch {0} is not an explicit (u, v) profile")]
    InvalidBranch(&'static str),

    #[error("the uniaxial escape solution requires an even index k, got k = {0}")]
    OddK(i32),

    #[error("norm constraint |Q|^2 = (2/3) s+^2 violated by {max_deviation:e}")]
    ConstraintViolated { max_deviation: f64 },

    #[error("Hardy decomposition needs v < 0 everywhere, node {node} has v = {value}")]
    DecompositionInvalid { node: usize, value: f64 },

    #[error("perturbation does not vanish on the boundary (max |P| = {0:e})")]
    BoundaryNotVanishing(f64),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
