use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("sample buffer has {got} entries, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },

    #[error("grid side must be at least {min}, got {n}")]
    GridTooSmall { n: usize, min: usize },

    #[error("grid side must be even, got {n}")]
    OddGrid { n: usize },

    #[error("grid side must be a power of two, got {n}")]
    NotPowerOfTwo { n: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("sampling mask violates conjugate symmetry at ({m},{k})")]
    AsymmetricMask { m: usize, k: usize },

    #[error("observation has a nonzero coefficient off the mask at ({m},{k})")]
    OffMaskValue { m: usize, k: usize },

    #[error("observation violates conjugate symmetry at ({m},{k})")]
    AsymmetricObservation { m: usize, k: usize },

    #[error("non-finite value in iterate at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("invalid container: {0}")]
    Format(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
