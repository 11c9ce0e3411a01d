use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not an odd prime in (2, 2^31)")]
    BadModulus(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operands belong to different prime fields")]
    FieldMismatch,
    #[error("range out of bounds: {0}")]
    RangeOutOfBounds(String),
    #[error("singular diagonal entry at index {0}")]
    SingularDiagonal(usize),
    #[error("row {0} is not a dependent row of the factorization")]
    NotADependentRow(usize),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("input size {0} exceeds the oracle size cap {1}")]
    SizeCapExceeded(usize, usize),
    #[error("field too small: need at least {0} distinct sample points, modulus is {1}")]
    FieldTooSmall(usize, u64),
}
