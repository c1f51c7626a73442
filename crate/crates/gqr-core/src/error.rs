//! Error type shared by all simulation modules.

use thiserror::Error;

/// Failure categories surfaced by the simulation core.
///
/// The split mirrors how a batch front end has to react: configuration
/// errors are the caller's fault and should be reported against the input,
/// singularity and integration errors are numerical outcomes of a valid
/// configuration.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Invalid parameters, unknown unit tags, violated preconditions.
    #[error("configuration error: {0}")]
    Config(String),

    /// Geometry placed a field point on top of a source.
    #[error("singular geometry: {0}")]
    Singularity(String),

    /// Step-size underflow or a non-finite state during integration.
    #[error("integration error: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub fn config(msg: impl Into<String>) -> Self {
        CoreError::Config(msg.into())
    }
}
