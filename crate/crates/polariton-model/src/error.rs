use qdyn_core::QdynError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter {key}: {reason}")]
    InvalidParam { key: &'static str, reason: String },
    #[error("sector {0} has degenerate eigenvalues; UP/LP labels are ill-defined")]
    DegenerateSector(char),
    #[error("unknown polariton label {0:?} (expected UP_A, UP_B, LP_A or LP_B)")]
    UnknownLabel(String),
    #[error("coupling fit did not converge within {0} iterations")]
    FitFailed(usize),
    #[error(transparent)]
    Qdyn(#[from] QdynError),
}
