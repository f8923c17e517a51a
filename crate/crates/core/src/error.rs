use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The input contained no vertex pairs at all.
    #[error("empty input: no vertex pairs were read")]
    EmptyInput,

    #[error("invalid vertex id {0}")]
    InvalidVertex(usize),

    #[error("spectral transitivity is undefined for a graph without edges")]
    UndefinedTau,

    #[error("corrupt triangle data: {0}")]
    CorruptInput(String),

    #[error("the live subgraph has no edges")]
    EmptySubgraph,

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("matrix dimension {n} exceeds the dense limit {limit}")]
    DenseLimit { n: usize, limit: usize },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}
