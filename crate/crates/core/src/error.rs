use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported local dimension {found}: this measure needs d = {expected}")]
    UnsupportedDimension { expected: usize, found: usize },

    #[error("state is not normalized (|psi|^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("Renyi index q = 1 is the Shannon limit; use the q1 method")]
    RenyiIndexOne,

    #[error("Gray sequence exhausted")]
    SequenceExhausted,

    #[error(
        "infinite energy: S(a) + epsilon = 0 for X-pattern {pattern:#x}; the epsilon -> 0 limit is \
         singular for this state, rerun with a positive epsilon"
    )]
    InfiniteEnergy { pattern: u64 },

    #[error("gate is not unitary (max |U^dag U - I| = {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("chunk {chunk} failed: {cause}")]
    Chunk { chunk: usize, cause: Box<Error> },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Strips chunk wrappers added by an executor.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::Chunk { cause, .. } => cause.root_cause(),
            e => e,
        }
    }
}
