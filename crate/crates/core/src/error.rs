use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),

    #[error("{0} must not be empty")]
    Empty(&'static str),

    /// Raised before any counter can wrap: an accumulator refuses to grow
    /// past `i32::MAX` contributions, which bounds every count.
    #[error("accumulator counter overflow: more than i32::MAX contributions")]
    CounterOverflow,

    #[error("accumulator has zero norm")]
    ZeroNorm,

    #[error("symbol {0:?} already present in codebook")]
    DuplicateSymbol(String),

    #[error("codebook is empty")]
    EmptyCodebook,

    #[error("symbol {0:?} not found in codebook")]
    UnknownSymbol(String),

    #[error("unknown label {0:?} in test set")]
    UnknownLabel(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("no location activated by the probe")]
    NoActiveLocation,

    #[error("sequence of {len} items exceeds the chunk limit of {limit}")]
    ChunkTooLarge { len: usize, limit: usize },

    #[error("all channel weights are zero")]
    ZeroWeights,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("bad file format: {0}")]
    Format(String),
}

pub(crate) fn dims(left: usize, right: usize) -> Error {
    Error::DimensionMismatch { left, right }
}
