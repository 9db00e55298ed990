use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("classes live in different lattices ({left} vs {right})")]
    LatticeMismatch { left: String, right: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("gram matrix of `{0}` is not symmetric")]
    NotSymmetric(String),

    #[error("matrix does not preserve the form of `{0}`")]
    NotIsometry(String),

    #[error("invalid involution indices ({0}, {1}); need 1 <= i < j <= 3")]
    InvolutionIndex(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),

    #[error("scenario rejected: {0}")]
    Scenario(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
