use cavity_solver::CavityError;
use polariton_model::ModelError;
use qdyn_core::QdynError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectroError {
    #[error("invalid scan setting {key}: {reason}")]
    InvalidScan { key: &'static str, reason: String },
    #[error("invalid argument {key}: {reason}")]
    InvalidArgument { key: &'static str, reason: String },
    #[error("cavity mode at {mode:.2} cm^-1 and model frequency {model:.2} cm^-1 differ by more than 5 cm^-1")]
    InconsistentInputs { mode: f64, model: f64 },
    #[error(transparent)]
    Qdyn(#[from] QdynError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Cavity(#[from] CavityError),
}
