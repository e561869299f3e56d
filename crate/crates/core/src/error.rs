use thiserror::Error;

use crate::thermo::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("inverse temperature must be finite and positive, got {0}")]
    InvalidBeta(f64),

    #[error("invalid population vector: {0}")]
    InvalidPopulation(#[from] Violation),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("x = {x} lies outside the curve domain [0, {z}]")]
    Domain { x: f64, z: f64 },

    #[error("curves were built at different inverse temperatures ({0} vs {1})")]
    BetaMismatch(f64, f64),

    #[error("block ({i}, {j}) is not positive semidefinite: |lambda|^2 = {lam_sq} > p_i p_j = {bound}")]
    Positivity {
        i: usize,
        j: usize,
        lam_sq: f64,
        bound: f64,
    },

    #[error("invalid block ({i}, {j}): {reason}")]
    InvalidBlock { i: usize, j: usize, reason: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("grid of {candidates:.3e} candidates exceeds the cap of {cap:.3e}; use a coarser resolution or fewer levels")]
    Resource { candidates: f64, cap: f64 },

    #[error("no grid point is thermomajorized by the initial state at resolution {0}")]
    NoFeasiblePoint(f64),

    #[error("degenerate ridge fit: every point has zero energy gap")]
    DegenerateFit,

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
