use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed graph: {0}")]
    Structure(String),

    #[error("vectors live on different graphs")]
    GraphMismatch,

    #[error("vertex {vertex} out of range (graph has {len} vertices)")]
    VertexOutOfRange { vertex: usize, len: usize },

    #[error("path is not edge-connected at step {step} ({from} -> {to})")]
    BrokenPath { step: usize, from: usize, to: usize },

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("singular Gram matrix (condition estimate {condition:.3e})")]
    SingularGram { condition: f64 },

    #[error("series order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series has non-unit constant term; refusing to invert")]
    NonUnitSeries,

    #[error("iteration cap {cap} exceeded (last relative increment {last_increment:.3e})")]
    IterationCap { cap: usize, last_increment: f64 },

    #[error("unsupported model family for this operation: {0}")]
    UnsupportedFamily(String),

    #[error("map error: {0}")]
    Map(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
