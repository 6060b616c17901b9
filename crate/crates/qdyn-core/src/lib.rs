//! Dense operator algebra for small open quantum systems.
//!
//! Spaces are ordered tensor products of truncated bosons and two-level
//! systems. Superoperators act on column-stacked density matrices, so that
//! `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`. Time evolution follows
//! `∂ρ/∂t = -i[H, ρ] + Σ_m (F_m ρ F_m† - ½{F_m† F_m, ρ})`.

mod density;
mod error;
mod operator;
mod propagate;
mod space;
mod superop;
pub mod units;

pub use density::{DensityMatrix, StateKind};
pub use error::QdynError;
pub use operator::{expectation, FactorOp, Operator};
pub use propagate::{propagate, Method, StepPropagator};
pub use space::{Factor, HilbertSpace};
pub use superop::{liouvillian, Superoperator};

pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for every operator and superoperator.
pub type CMat = nalgebra::DMatrix<C64>;
/// Dense complex column vector (state vectors and vectorized ρ).
pub type CVec = nalgebra::DVector<C64>;

pub type Result<T> = std::result::Result<T, QdynError>;
