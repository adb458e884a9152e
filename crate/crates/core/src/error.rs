use thiserror::Error;

/// Failures surfaced by the geometric operations and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("rejected input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("{what} did not converge (best bound {best:e})")]
    Numerical { what: &'static str, best: f64 },

    #[error("line misses the dual sphere: induced hamiltonian {level} > 1")]
    NoIntersection { level: f64 },

    #[error("ill-conditioned input: induced hamiltonian {level} is within the tangency band, use the boundary map")]
    IllConditioned { level: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
