use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: u64 },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(usize),

    #[error("{0}")]
    Domain(String),

    #[error("vertex set induces {components} connected components; run once per component")]
    DisconnectedSubset { components: usize },

    #[error(
        "power iteration did not converge after {iterations} iterations \
         (best lambda estimate {lambda}, residual {residual:e})"
    )]
    NoConvergence {
        iterations: usize,
        lambda: f64,
        residual: f64,
    },

    #[error("certificate violated at step {step}: margin {margin:e}")]
    CertificateViolation { step: usize, margin: f64 },

    #[error("exhaustive enumeration refused: {n} vertices exceeds the limit of {limit}")]
    Infeasible { n: usize, limit: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
