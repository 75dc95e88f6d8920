use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square or has inconsistent row lengths")]
    Shape,
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("form is singular")]
    Singular,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("columns are linearly dependent")]
    RankDeficient,
    #[error("subspace is degenerate for the bilinear form")]
    DegenerateSubspace,
    #[error("valuation of zero is infinite")]
    ZeroValuation,
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("target rank {target} exceeds ambient rank {ambient}")]
    RankViolation { target: usize, ambient: usize },
    #[error("unsupported neighbor prime {0}: must be odd and coprime to the determinant")]
    UnsupportedNeighborPrime(u64),
    #[error("genus record is incomplete")]
    IncompleteGenus,
    #[error("inconsistent glue data: {0}")]
    InconsistentGlue(String),
    #[error("integer overflow in machine-word enumeration kernel")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
