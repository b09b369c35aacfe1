use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("mode {mode} out of range for an order-{order} tensor")]
    ModeOutOfRange { mode: usize, order: usize },
    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: Vec<usize>, found: Vec<usize> },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("rank {rank} out of range (limit {limit}) in mode {mode}")]
    RankOutOfRange { mode: usize, rank: usize, limit: usize },
    #[error("this solver requires an observation mask")]
    MaskRequired,
    #[error("this solver does not accept an observation mask")]
    MaskNotSupported,
    #[error("solver result carries no multipliers")]
    MultipliersAbsent,
    #[error("reference tensor has zero norm")]
    ZeroReference,
    #[error("could not draw a tensor with the requested ranks after {0} attempts")]
    GenerationFailed(usize),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
