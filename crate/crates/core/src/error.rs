use thiserror::Error;

/// Failure categories shared by every module.
///
/// The variants map one-to-one onto the process exit codes used by the
/// command line front end (see [`Error::exit_code`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("accuracy target not met: {0}")]
    Accuracy(String),

    #[error("geometry: {0}")]
    Geometry(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }

    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub fn accuracy(msg: impl Into<String>) -> Self {
        Error::Accuracy(msg.into())
    }

    pub fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    /// Exit code: 2 input, 3 hypothesis violation, 4 resource, 5 accuracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::DimensionMismatch { .. } => 2,
            Error::Hypothesis(_) | Error::Geometry(_) => 3,
            Error::Resource(_) => 4,
            Error::Accuracy(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        Err(Error::DimensionMismatch { expected, got })
    } else {
        Ok(())
    }
}
