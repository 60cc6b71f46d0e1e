use thiserror::Error;

/// Errors surfaced by the library. Mathematical check failures are reported
/// through [`crate::report`] rather than through this type.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid discriminant {0}")]
    InvalidDiscriminant(i64),
    #[error("discriminant {0} is not admissible (need d = 1 mod 8 and 3 not dividing d)")]
    Inadmissible(i64),
    #[error("discriminant {0} is not 1 mod 8")]
    NotOneMod8(i64),
    #[error("point is not in the upper half plane")]
    NotInUpperHalfPlane,
    #[error("matrix is not in Gamma_0(2)")]
    NotInGamma02,
    #[error("rounding could not be certified after {0} bits")]
    RoundingUncertified(u32),
    #[error("series truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("series has no unique leading term and cannot be inverted")]
    NotInvertible,
    #[error("a non-integral power of 2 survived: {0}")]
    SymbolicExponentLeak(String),
    #[error("product is not a perfect square under a half exponent: {0}")]
    NonSquare(String),
    #[error("epsilon is undefined at {0}")]
    Undefined(u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
