use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("measure has zero Lebesgue volume; use total mass")]
    ZeroVolume,

    #[error("geometry evaluation inconsistent: {0}")]
    InconsistentGeometry(String),

    #[error("unsupported variant combination: {0}")]
    Unsupported(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no decay detected: {0}")]
    NoDecay(String),

    #[error(
        "truncation captures only {captured:.4} of the transform mass; \
         a half-side of at least {required_half_side} is required"
    )]
    TruncationTooSmall {
        captured: f64,
        required_half_side: f64,
    },

    #[error("no finite gap radius exists: {0}")]
    Degenerate(String),

    #[error("request extends beyond the stored window of an explicit spectrum")]
    Unbounded,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
