use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid measure space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("empty family")]
    EmptyFamily,
    #[error("convexity violated at breakpoint {0}")]
    ConvexityViolated(usize),
    #[error("improper function: {0}")]
    Improper(String),
    #[error("invalid function: {0}")]
    InvalidFunction(String),
    #[error("degenerate quadratic: {0}")]
    DegenerateQuadratic(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid epigraph: {0}")]
    InvalidEpigraph(String),
}

pub type Result<T> = std::result::Result<T, Error>;
