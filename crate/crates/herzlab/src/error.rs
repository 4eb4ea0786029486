use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent {0}: expected 1 < p < inf")]
    Exponent(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("zero-dimensional {0} is not allowed")]
    Empty(&'static str),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("group axiom violated: {0}")]
    Group(String),
    #[error("no feasible factorization: {0}")]
    Infeasible(String),
    #[error("invalid input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
