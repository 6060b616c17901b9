use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CavityError {
    #[error("invalid geometry {key}: {reason}")]
    InvalidGeometry { key: &'static str, reason: String },
    #[error("only {found} s-wave modes among the lowest {searched} eigenpairs, need {wanted}")]
    TooFewBrightModes {
        found: usize,
        searched: usize,
        wanted: usize,
    },
    #[error("eigensolver did not converge in {iterations} iterations (worst relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("calibration did not converge within {0} evaluations")]
    CalibrationFailed(usize),
    #[error("invalid argument {key}: {reason}")]
    InvalidArgument { key: &'static str, reason: String },
    #[error("bright modes are not ordered as expected: {0}")]
    BrightOrdering(String),
}
