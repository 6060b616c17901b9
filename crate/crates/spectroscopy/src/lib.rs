//! Pump–probe signals from the perturbative expansion of the density matrix.
//!
//! Each field interaction maps `ρ → i[V, ρ]`; between interactions the state
//! evolves under the model's Liouvillian. Emission is read out through the
//! annihilating half of the drive, `Tr(V⁻ ρ)` with `V⁻ = Σ μ_i a_i`, which
//! keeps the positive-frequency part of `Tr(V ρ)`. Time grids are uniform
//! with step `dt`; frequency axes are in cm⁻¹ with the rotating frame added
//! back.

mod config;
mod engine;
mod error;
mod fft;
mod image;
mod linear;
mod scan;
mod twod;

pub use config::{ScanConfig, Window};
pub use engine::{coherence_order_projector, kick, Detection, Engine};
pub use error::SpectroError;
pub use fft::{apodize, detrend_quadratic, dominant_peak, find_peaks, Peak};
pub use image::{hyperspectral_dynamics, hyperspectral_linear, HyperspectralImage, BAND_HALF_WIDTH, MODE_MISMATCH_LIMIT};
pub use linear::{linear_spectrum, Spectrum1D};
pub use scan::{beat_spectrum, coherence_scan, coherence_scan_detected, dominant_beat, series_beats, CoherenceScan};
pub use twod::{third_order_2dir, Pathway, Spectrum2D};

pub type Result<T> = std::result::Result<T, SpectroError>;
