//! Scalar wave-equation modes of a periodic checkerboard of two cavity
//! depths.
//!
//! The unit cell is a 2×2 block of squares. Each point of the cell sees
//! `c² (−∇² + (nπ/d(r))²) E = ω² E` with periodic boundaries, discretized on
//! a cell-centred `N×N` grid with the five-point Laplacian.

mod calibrate;
mod error;
mod geometry;
mod helmholtz;
mod lobpcg;
mod modes;
mod momentum;

pub use calibrate::{calibrate_speed, CalibrateOptions, Calibration, CalibrationStage};
pub use error::CavityError;
pub use geometry::{CavityGeometry, Region};
pub use helmholtz::{assemble_helmholtz, FourierPreconditioner, Helmholtz};
pub use lobpcg::{lobpcg, Eigenpairs, LobpcgOptions};
pub use modes::{
    bright_pair, classify, profile_cut, solve_bright_modes, solve_mode_table, solve_modes, ModeSolution,
    SolveOptions,
};
pub use momentum::{inplane_momentum, Momentum, MomentumKind};

pub type Result<T> = std::result::Result<T, CavityError>;
