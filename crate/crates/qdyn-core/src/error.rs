use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QdynError {
    #[error("a Hilbert space needs at least one factor")]
    EmptySpace,
    #[error("boson cutoff must be >= 1, got {0}")]
    InvalidCutoff(usize),
    #[error("factor index {index} out of range for a space with {len} factors")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("operator {kind} does not apply to factor {index} ({factor})")]
    KindMismatch {
        kind: String,
        index: usize,
        factor: String,
    },
    #[error("operands live on different Hilbert spaces")]
    SpaceMismatch,
    #[error("matrix has shape {rows}x{cols}, expected {expected}x{expected}")]
    Shape {
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid time argument: {0}")]
    InvalidTime(String),
    #[error("propagation produced non-finite entries; reduce the step")]
    NonFinite,
}
