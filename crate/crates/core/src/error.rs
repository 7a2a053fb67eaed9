use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("precision exhausted at {bits} bits: {detail}")]
    PrecisionExhausted { bits: usize, detail: String },
    #[error("grid too small: need at least {required} samples")]
    GridTooSmall { required: usize },
    #[error("internal invariant broken: {0}")]
    Internal(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
