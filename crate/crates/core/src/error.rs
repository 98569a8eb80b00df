use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("displacement |xi| = {0} exceeds 1 on the reconstruction path")]
    DisplacementTooLarge(f64),

    #[error("mixed-sign displacements within one sweep (cell {cell})")]
    MixedSign { cell: usize },

    #[error("cell value {value} lies outside its bounds [{min}, {max}]")]
    OutOfBounds { value: f64, min: f64, max: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("CFL violation: {what} = {value} > {limit}")]
    Cfl { what: &'static str, value: f64, limit: f64 },

    #[error("wavenumber k = {k} is not commensurate with {n_cells} cells")]
    NonCommensurate { k: f64, n_cells: usize },

    #[error("net charge {0:e} is not neutral; the periodic field cannot be built")]
    NonNeutral(f64),

    #[error("non-finite value detected at step {step}")]
    NonFinite { step: usize },

    #[error("convergence order needs positive errors (got {0:e})")]
    NonPositiveError(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
