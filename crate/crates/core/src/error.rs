use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Input` covers precondition violations on caller-supplied data,
/// `Degenerate` covers inputs or outputs that are structurally valid but
/// carry no usable information (all points identical, empty denoise result),
/// and `Internal` flags a broken invariant that should never be reachable
/// through the public API.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
