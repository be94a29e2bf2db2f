use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground set size {0} is outside 1..=64")]
    GroundSetSize(usize),
    #[error("element {element} is outside the ground set [{n}]")]
    ElementOutOfRange { element: usize, n: usize },
    #[error("mask {bits:#x} has bits outside a ground set of size {n}")]
    MaskOutOfRange { bits: u64, n: usize },
    #[error("ground set mismatch: {0} vs {1}")]
    GroundSetMismatch(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("family is empty")]
    EmptyFamily,
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("family is not uniform")]
    NotUniform,
    #[error("polynomial degree {degree} exceeds {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
