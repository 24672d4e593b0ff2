use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fee {fee} is outside the fee model domain: {reason}")]
    Domain { fee: f64, reason: String },

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("long-run prediction requires the maximum-delivery-time signal")]
    UnsupportedSignal,

    /// The closed form does not describe the optimum for these inputs.
    #[error("closed form not applicable: {0}")]
    RegimeViolation(String),

    #[error("no feasible point with positive cycle length")]
    InfeasibleProblem,

    #[error("configuration does not cover table {table}: {detail}")]
    ConfigMismatch { table: String, detail: String },

    #[error("{path}: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
