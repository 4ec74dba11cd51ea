use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("permutation is reducible")]
    Reducible,
    #[error("paths do not share a start vertex")]
    MismatchedStart,
    #[error("Rauzy induction undefined: last letters have equal lengths")]
    Tie,
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("cone is not pointed")]
    NonPointedCone,
    #[error("point is not strictly inside the cone")]
    BoundaryPoint,
    #[error("loop does not start and end at the same vertex")]
    NotALoop,
    #[error("path is not a neat loop: {0}")]
    NotNeat(String),
    #[error("state is not in the section: {0}")]
    NotInSection(String),
    #[error("no return to the section within {0} induction steps")]
    ReturnBudget(usize),
    #[error("decorated class is not essential")]
    NotEssential,
    #[error("vertex is not a member of the class")]
    NotInClass,
    #[error("empty letter subset")]
    EmptySubset,
    #[error("invalid map specification: {0}")]
    BadSpec(String),
    #[error("power iteration did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("invalid command line: {0}")]
    Cli(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
