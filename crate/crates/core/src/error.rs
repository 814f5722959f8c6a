use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A formula was evaluated outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid constants: {0}")]
    Constants(String),

    #[error("{path}:{line}: {msg}")]
    Config { path: PathBuf, line: usize, msg: String },

    #[error("weight file parse error: {0}")]
    WeightParse(String),

    #[error("layer {layer}: {msg}")]
    Dimension { layer: usize, msg: String },

    #[error("sampling failed after {attempts} proposals: {msg}")]
    Sampling { attempts: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
