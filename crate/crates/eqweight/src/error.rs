use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("not a subspace: {0}")]
    NotSubspace(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("variance mismatch: {0}")]
    Variance(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("not equivariant: {0}")]
    NotEquivariant(String),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("invalid resolution: {0}")]
    InvalidResolution(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsolvable system: {0}")]
    Unsolvable(String),
    #[error("invalid simplicial set: {0}")]
    InvalidSpace(String),
    #[error("unknown builtin: {0}")]
    UnknownBuiltin(String),
    #[error("self-check failed: {0}")]
    Inconsistent(String),
    #[error("invalid argument: {0}")]
    Argument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
