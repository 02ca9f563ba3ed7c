use thiserror::Error;

/// Errors raised by the algebra, counting and code layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeP(u64),
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("modulus degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("curve is singular (discriminant is zero)")]
    SingularCurve,
    #[error("point is not on the curve")]
    PointNotOnCurve,
    #[error("Hasse bound violated: {points} points over F_{q}")]
    HasseViolation { q: u64, points: u64 },
    #[error("group decomposition failed: {0}")]
    DecompositionFailure(String),
    #[error("point is not part of the group table")]
    UnknownPoint,
    #[error("invalid permutation type: {0}")]
    InvalidType(String),
    #[error("evaluation set contains a duplicate element")]
    DuplicateElement,
    #[error("k = {k} out of range for a set of size {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("Riemann-Roch basis is rank deficient")]
    DegenerateBasis,
    #[error("k = 0 is not supported")]
    UnsupportedK,
    #[error("divisor point lies in the evaluation set")]
    DivisorPointInD,
    #[error("function has a pole at the evaluation point")]
    PoleAtPoint,
    #[error("generator matrix has rank {rank} < {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
