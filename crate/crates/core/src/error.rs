use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("decode failed: {0}")]
    Decode(String),
    #[error("state too large: {0} qubits exceeds the dense limit")]
    TooLarge(usize),
    #[error("not canonical: {0}")]
    NotCanonical(String),
    #[error("not unitary: {0}")]
    NotUnitary(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
