use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: grids are built for dim 1 or 2")]
    UnsupportedDim(u32),
    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate exponents: {0}")]
    DegenerateExponents(String),
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("operands live on different grids")]
    GridMismatch,
    #[error("focal-time singularity: 1 + 4bt = 0")]
    FocalSingularity,
    #[error("step failure: {0}")]
    StepFailure(String),
    #[error("degenerate seed: iterate collapsed toward zero")]
    DegenerateSeed,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("snapshot format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
