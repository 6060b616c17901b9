use qdyn_core::units::wavenumber_to_angular;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumKind {
    /// Propagating in-plane wave.
    Real,
    /// Evanescent: the frequency is below the local cutoff.
    Imaginary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum {
    /// `|k|` in μm⁻¹.
    pub magnitude: f64,
    pub kind: MomentumKind,
}

/// In-plane wavevector of a mode of wavenumber `nu` (cm⁻¹) in a region of
/// depth `d` (μm): `k² = ω²/c² − (nπ/d)²`.
pub fn inplane_momentum(nu: f64, d: f64, n: u32, c_eff: f64) -> Momentum {
    let omega = wavenumber_to_angular(nu);
    let (k0, kz) = ((omega / c_eff).powi(2), (n as f64 * PI / d).powi(2));
    let mut radicand = k0 - kz;
    // a mode sitting on the cutoff should not flip kind through round-off
    if radicand.abs() <= 1e-12 * k0.max(kz) {
        radicand = 0.0;
    }
    Momentum {
        magnitude: radicand.abs().sqrt(),
        kind: if radicand >= 0.0 {
            MomentumKind::Real
        } else {
            MomentumKind::Imaginary
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdyn_core::units::angular_to_wavenumber;

    #[test]
    fn cutoff_gives_zero() {
        let (d, n, c) = (12.5, 4, 250.0);
        let nu = angular_to_wavenumber(c * n as f64 * PI / d);
        let k = inplane_momentum(nu, d, n, c);
        assert_eq!(k.kind, MomentumKind::Real);
        assert!(k.magnitude < 1e-6);
    }

    #[test]
    fn below_cutoff_is_evanescent() {
        let (n, c) = (4, 250.0);
        let cut_a = angular_to_wavenumber(c * 4.0 * PI / 12.5);
        let k = inplane_momentum(cut_a - 5.0, 12.5, n, c);
        assert_eq!(k.kind, MomentumKind::Imaginary);
        assert!(k.magnitude > 0.0);
        let k = inplane_momentum(cut_a, 12.7, n, c);
        assert_eq!(k.kind, MomentumKind::Real);
        assert!(k.magnitude > 0.0);
    }
}
