//! Unit conversions shared by the solvers.
//!
//! Frequencies are reported as wavenumbers (cm⁻¹); dynamics run in ps with
//! angular frequencies in rad/ps; lengths are in μm.

use std::f64::consts::PI;

/// Vacuum speed of light in cm/ps.
pub const C0_CM_PER_PS: f64 = 0.029_979_245_8;
/// Vacuum speed of light in μm/ps.
pub const C0_UM_PER_PS: f64 = 299.792_458;

/// Wavenumber (cm⁻¹) to angular frequency (rad/ps).
pub fn wavenumber_to_angular(nu: f64) -> f64 {
    2.0 * PI * C0_CM_PER_PS * nu
}

/// Angular frequency (rad/ps) to wavenumber (cm⁻¹).
pub fn angular_to_wavenumber(omega: f64) -> f64 {
    omega / (2.0 * PI * C0_CM_PER_PS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let w = wavenumber_to_angular(1983.0);
        assert!((angular_to_wavenumber(w) - 1983.0).abs() < 1e-10);
        // 1 cm⁻¹ is about 0.188 rad/ps
        assert!((wavenumber_to_angular(1.0) - 0.188_365_156_730_885).abs() < 1e-12);
    }
}
