use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("a product of {n_bits} bits exceeds the GF(2^{m}) limit of {max_bits} bits")]
    TooLong { n_bits: u128, m: usize, max_bits: u128 },

    #[error("partition dimension {l} must be below {limit} for GF(2^{m})")]
    PartitionTooLarge { l: u32, m: usize, limit: u32 },

    #[error("y^2 + y = v_{0} has no solution; the reduction polynomial is wrong")]
    NoCantorContinuation(usize),

    #[error("reduction polynomial for GF(2^{0}) is not irreducible")]
    ReducibleModulus(usize),

    #[error("GF(2) matrix is singular: {0}")]
    SingularMatrix(&'static str),

    #[error("basis index {0} has no defined Frobenius order formula")]
    InvalidBasisIndex(usize),

    #[error("explicit enumeration is limited to GF(2^16), got GF(2^{0})")]
    FieldTooLarge(usize),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
