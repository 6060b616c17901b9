use crate::{Result, SpectroError};
use qdyn_core::units::C0_CM_PER_PS;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    None,
    /// `cos²` taper: half window on free decays, full window on beat traces.
    Cosine2,
}

/// Time grids and FFT settings. Times in ps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub dt: f64,
    pub t1_max: f64,
    pub t2_max: f64,
    pub t3_max: f64,
    pub window: Window,
    pub zero_pad: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            t1_max: 8.0,
            t2_max: 6.0,
            t3_max: 8.0,
            window: Window::Cosine2,
            zero_pad: 4,
        }
    }
}

fn bad(key: &'static str, reason: impl Into<String>) -> SpectroError {
    SpectroError::InvalidScan {
        key,
        reason: reason.into(),
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(bad("dt", format!("{} ps must be > 0", self.dt)));
        }
        for (key, t) in [("t1_max", self.t1_max), ("t2_max", self.t2_max), ("t3_max", self.t3_max)] {
            if !(t.is_finite() && t >= self.dt) {
                return Err(bad(key, format!("{t} ps must be >= dt")));
            }
        }
        if self.zero_pad < 1 {
            return Err(bad("zero_pad", "padding factor must be >= 1"));
        }
        if self.nyquist() < 200.0 {
            return Err(bad("dt", format!("Nyquist {:.1} cm^-1 is below 200 cm^-1", self.nyquist())));
        }
        Ok(())
    }

    /// Nyquist wavenumber of the time step, cm⁻¹.
    pub fn nyquist(&self) -> f64 {
        1.0 / (2.0 * C0_CM_PER_PS * self.dt)
    }

    /// Number of samples `0, dt, …` covering `[0, t_max]`.
    pub fn samples(&self, t_max: f64) -> usize {
        (t_max / self.dt + 1e-9).floor() as usize + 1
    }

    /// FFT bin width in cm⁻¹ for a window of `n` samples.
    pub fn bin(&self, n: usize) -> f64 {
        1.0 / (C0_CM_PER_PS * self.dt * (n * self.zero_pad) as f64)
    }
}
