//! Two coupled microcavities, each holding one photon mode strongly coupled
//! to a collective molecular vibration.
//!
//! Factor order is fixed: photon A, photon B, vibration A, vibration B.
//! Photon modes are truncated bosons, vibrations are two-level systems.
//! Frequencies are given in cm⁻¹ and entered into the Hamiltonian as
//! detunings from a rotating frame, in rad/ps.

mod basis;
mod error;
mod fit;
mod model;
mod params;

pub use basis::{polariton_basis, prepare_coherence, Polariton, PolaritonBasis, Sector};
pub use error::ModelError;
pub use fit::{fit_coupling, sector_eigenvalues, CouplingFit};
pub use model::{
    build_hamiltonian, drive_lowering, drive_operator, excitation_number, jump_operators, Model,
    PHOTON_A, PHOTON_B, VIB_A, VIB_B,
};
pub use params::ModelParams;

pub type Result<T> = std::result::Result<T, ModelError>;
