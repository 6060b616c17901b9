use crate::{ModelError, Result};
use serde::{Deserialize, Serialize};

/// Physical constants of the two-cavity model.
///
/// Frequencies in cm⁻¹, rates in ps⁻¹. `gamma` holds, in order, photon A
/// loss, photon B loss, vibration A relaxation, vibration B relaxation and the
/// A→B photon transfer rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    #[serde(rename = "omega_A")]
    pub omega_a: f64,
    #[serde(rename = "omega_B")]
    pub omega_b: f64,
    pub omega_0: f64,
    pub g: f64,
    #[serde(rename = "mu_A")]
    pub mu_a: f64,
    #[serde(rename = "mu_B")]
    pub mu_b: f64,
    pub gamma: [f64; 5],
    pub gamma_phi: f64,
    pub n_max: usize,
    pub frame: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega_a: 1998.2,
            omega_b: 1971.4,
            omega_0: 1983.0,
            g: 18.7,
            mu_a: 1.0,
            mu_b: 1.0,
            // tuned so every prepared coherence fades within 3 to 4 ps
            gamma: [0.1, 0.3, 0.1, 0.4, 0.3],
            gamma_phi: 0.0,
            n_max: 2,
            frame: 1983.0,
        }
    }
}

fn bad(key: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParam {
        key,
        reason: reason.into(),
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        for (key, v) in [
            ("omega_A", self.omega_a),
            ("omega_B", self.omega_b),
            ("omega_0", self.omega_0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(key, format!("{v} cm^-1 must be a positive frequency")));
            }
        }
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(bad("g", format!("{} cm^-1 must be >= 0", self.g)));
        }
        if self.g >= self.omega_a.min(self.omega_b) {
            return Err(bad("g", "must be below both cavity frequencies"));
        }
        for (key, v) in [("mu_A", self.mu_a), ("mu_B", self.mu_b), ("frame", self.frame)] {
            if !v.is_finite() {
                return Err(bad(key, "must be finite"));
            }
        }
        for (i, &r) in self.gamma.iter().enumerate() {
            if !(r.is_finite() && r >= 0.0) {
                return Err(bad("gamma", format!("entry {} = {r} ps^-1 must be >= 0", i + 1)));
            }
        }
        if !(self.gamma_phi.is_finite() && self.gamma_phi >= 0.0) {
            return Err(bad("gamma_phi", format!("{} ps^-1 must be >= 0", self.gamma_phi)));
        }
        if self.n_max < 1 {
            return Err(bad("n_max", "boson cutoff must be >= 1"));
        }
        Ok(())
    }
}
