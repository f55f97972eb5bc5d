use crate::types::Window;

/// Errors produced by the search library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("window [{start}, {end}) out of bounds for series of length {len}")]
    WindowOutOfBounds { start: usize, end: usize, len: usize },

    #[error("window {candidate} overlaps existing result window {existing}")]
    OverlappingWindow { candidate: Window, existing: Window },

    #[error("need more than {k} samples for k={k} neighbor estimation, got {n}")]
    InsufficientSamples { n: usize, k: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("ingest error: {0}")]
    Ingest(String),

    #[error("point id {0} is not live in this state")]
    PointNotFound(usize),

    #[error("state was built on window {expected}, slide requested from {given}")]
    StateDesync { expected: Window, given: Window },

    #[error("worker for chunk {chunk} failed")]
    WorkerFailed { chunk: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code for the CLI: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::WindowOutOfBounds { .. } => 2,
            _ => 1,
        }
    }
}
