use crate::{ModelError, ModelParams, Result, PHOTON_A, PHOTON_B, VIB_A, VIB_B};
use qdyn_core::{CMat, DensityMatrix, HilbertSpace, C64};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    A,
    B,
}

impl Sector {
    pub fn letter(self) -> char {
        match self {
            Sector::A => 'A',
            Sector::B => 'B',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polariton {
    UpA,
    UpB,
    LpA,
    LpB,
}

impl Polariton {
    pub const ALL: [Polariton; 4] = [Polariton::UpA, Polariton::UpB, Polariton::LpA, Polariton::LpB];

    pub fn sector(self) -> Sector {
        match self {
            Polariton::UpA | Polariton::LpA => Sector::A,
            Polariton::UpB | Polariton::LpB => Sector::B,
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Polariton::UpA | Polariton::UpB)
    }

    pub fn name(self) -> &'static str {
        match self {
            Polariton::UpA => "UP_A",
            Polariton::UpB => "UP_B",
            Polariton::LpA => "LP_A",
            Polariton::LpB => "LP_B",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Polariton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Polariton {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self> {
        Polariton::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ModelError::UnknownLabel(s.to_string()))
    }
}

/// Single-excitation eigenstates of the two-cavity Hamiltonian.
///
/// Vectors are expressed in the ordered basis (photon A, photon B,
/// vibration A, vibration B) with a non-negative photon amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct PolaritonBasis {
    freqs: [f64; 4],
    vectors: [[f64; 4]; 4],
}

impl PolaritonBasis {
    /// Absolute frequency in cm⁻¹.
    pub fn freq(&self, p: Polariton) -> f64 {
        self.freqs[p.slot()]
    }

    pub fn vector(&self, p: Polariton) -> [f64; 4] {
        self.vectors[p.slot()]
    }

    /// (photon fraction, matter fraction).
    pub fn hopfield(&self, p: Polariton) -> (f64, f64) {
        let v = self.vector(p);
        let photon = v[0] * v[0] + v[1] * v[1];
        let matter = v[2] * v[2] + v[3] * v[3];
        (photon, matter)
    }
}

/// Diagonalizes each cavity's photon–vibration block.
pub fn polariton_basis(p: &ModelParams) -> Result<PolaritonBasis> {
    p.validate()?;
    let mut freqs = [0.0; 4];
    let mut vectors = [[0.0; 4]; 4];
    for (sector, omega, up, lp, photon_slot, vib_slot) in [
        (Sector::A, p.omega_a, Polariton::UpA, Polariton::LpA, 0, 2),
        (Sector::B, p.omega_b, Polariton::UpB, Polariton::LpB, 1, 3),
    ] {
        let m = nalgebra::Matrix2::new(omega, p.g, p.g, p.omega_0);
        let eig = m.symmetric_eigen();
        let (hi, lo) = if eig.eigenvalues[0] >= eig.eigenvalues[1] {
            (0, 1)
        } else {
            (1, 0)
        };
        if (eig.eigenvalues[hi] - eig.eigenvalues[lo]).abs() < 1e-9 {
            return Err(ModelError::DegenerateSector(sector.letter()));
        }
        for (label, col) in [(up, hi), (lp, lo)] {
            let mut ph = eig.eigenvectors[(0, col)];
            let mut vib = eig.eigenvectors[(1, col)];
            if ph < 0.0 || (ph == 0.0 && vib < 0.0) {
                ph = -ph;
                vib = -vib;
            }
            let mut v = [0.0; 4];
            v[photon_slot] = ph;
            v[vib_slot] = vib;
            freqs[label.slot()] = eig.eigenvalues[col];
            vectors[label.slot()] = v;
        }
    }
    Ok(PolaritonBasis { freqs, vectors })
}

/// Single-excitation product-basis indices in (photon A, photon B, vib A,
/// vib B) order.
pub(crate) fn single_excitation_indices(space: &HilbertSpace) -> [usize; 4] {
    let mut out = [0; 4];
    for (k, factor) in [PHOTON_A, PHOTON_B, VIB_A, VIB_B].into_iter().enumerate() {
        let mut digits = vec![0; space.factors().len()];
        digits[factor] = 1;
        out[k] = space.index_of(&digits);
    }
    out
}

/// `|P_ket⟩⟨P_bra|` embedded in the full space as a perturbative branch.
pub fn prepare_coherence(
    basis: &PolaritonBasis,
    ket: Polariton,
    bra: Polariton,
    space: &Arc<HilbertSpace>,
) -> Result<DensityMatrix> {
    let idx = single_excitation_indices(space);
    let d = space.dim();
    let mut m = CMat::zeros(d, d);
    let (u, v) = (basis.vector(ket), basis.vector(bra));
    for i in 0..4 {
        for j in 0..4 {
            m[(idx[i], idx[j])] = C64::new(u[i] * v[j], 0.0);
        }
    }
    Ok(DensityMatrix::branch(space.clone(), m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Model, PHOTON_A};
    use qdyn_core::{expectation, propagate, Method};

    fn closed_form(omega: f64, w0: f64, g: f64) -> (f64, f64) {
        let mid = 0.5 * (omega + w0);
        let r = ((0.5 * (omega - w0)).powi(2) + g * g).sqrt();
        (mid + r, mid - r)
    }

    #[test]
    fn default_frequencies_match_closed_form() {
        let p = ModelParams::default();
        let b = polariton_basis(&p).unwrap();
        let (ua, la) = closed_form(1998.2, 1983.0, 18.7);
        let (ub, lb) = closed_form(1971.4, 1983.0, 18.7);
        assert!((b.freq(Polariton::UpA) - ua).abs() < 1e-9);
        assert!((b.freq(Polariton::LpA) - la).abs() < 1e-9);
        assert!((b.freq(Polariton::UpB) - ub).abs() < 1e-9);
        assert!((b.freq(Polariton::LpB) - lb).abs() < 1e-9);
        for (label, want) in [
            (Polariton::UpA, 2010.8),
            (Polariton::UpB, 1996.8),
            (Polariton::LpA, 1970.4),
            (Polariton::LpB, 1957.6),
        ] {
            assert!((b.freq(label) - want).abs() < 0.05, "{label}");
        }
    }

    #[test]
    fn basis_orthonormal_and_fractions_sum() {
        let b = polariton_basis(&ModelParams::default()).unwrap();
        for x in Polariton::ALL {
            for y in Polariton::ALL {
                let dot: f64 = (0..4).map(|k| b.vector(x)[k] * b.vector(y)[k]).sum();
                let want = if x == y { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
            let (ph, mt) = b.hopfield(x);
            assert!((ph + mt - 1.0).abs() < 1e-12);
        }
        let w0 = 1983.0;
        for s in [(Polariton::UpA, Polariton::LpA), (Polariton::UpB, Polariton::LpB)] {
            assert!(b.freq(s.0) > w0 && w0 > b.freq(s.1));
        }
    }

    #[test]
    fn resonant_and_decoupled_limits() {
        let mut p = ModelParams::default();
        p.omega_a = p.omega_0;
        let b = polariton_basis(&p).unwrap();
        let (ph, mt) = b.hopfield(Polariton::UpA);
        assert!((ph - 0.5).abs() < 1e-12 && (mt - 0.5).abs() < 1e-12);

        let mut p = ModelParams::default();
        p.g = 0.0;
        let b = polariton_basis(&p).unwrap();
        assert_eq!(b.freq(Polariton::UpA), 1998.2);
        assert_eq!(b.hopfield(Polariton::UpA).0, 1.0);
        assert_eq!(b.freq(Polariton::LpB), 1971.4);

        p.omega_a = p.omega_0;
        assert_eq!(polariton_basis(&p), Err(ModelError::DegenerateSector('A')));
    }

    #[test]
    fn labels_parse() {
        assert_eq!("UP_A".parse::<Polariton>().unwrap(), Polariton::UpA);
        assert_eq!("lp_b".parse::<Polariton>().unwrap(), Polariton::LpB);
        assert!("XP_A".parse::<Polariton>().is_err());
    }

    #[test]
    fn prepared_states() {
        let m = Model::new(ModelParams::default()).unwrap();
        let pop = prepare_coherence(&m.basis, Polariton::UpA, Polariton::UpA, &m.space).unwrap();
        assert!(pop.hermitian_deviation() < 1e-15);
        assert!((pop.trace().re - 1.0).abs() < 1e-12);
        let ev = pop.eigenvalues();
        assert!((ev[ev.len() - 1] - 1.0).abs() < 1e-12 && ev[ev.len() - 2].abs() < 1e-12);

        let coh = prepare_coherence(&m.basis, Polariton::UpA, Polariton::LpA, &m.space).unwrap();
        assert!(coh.trace().norm() < 1e-12);
        assert!((coh.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn photon_a_population_of_up_a() {
        let m = Model::new(ModelParams::default()).unwrap();
        let pop = prepare_coherence(&m.basis, Polariton::UpA, Polariton::UpA, &m.space).unwrap();
        let n = qdyn_core::Operator::factor(&m.space, PHOTON_A, qdyn_core::FactorOp::Number).unwrap();
        let got = expectation(&n, &pop).unwrap().re;
        assert!((got - m.basis.hopfield(Polariton::UpA).0).abs() < 1e-12);
    }

    #[test]
    fn coherence_phase_rotates_at_rabi_splitting() {
        let mut p = ModelParams::default();
        p.gamma = [0.0; 5];
        let m = Model::new(p).unwrap();
        let rho = prepare_coherence(&m.basis, Polariton::UpA, Polariton::LpA, &m.space).unwrap();
        let split = m.basis.freq(Polariton::UpA) - m.basis.freq(Polariton::LpA);
        assert!((split - 40.4).abs() < 0.1);
        let omega = qdyn_core::units::wavenumber_to_angular(split);
        // the UP_A/LP_A element picks up e^{-iΔω t}
        let idx = single_excitation_indices(&m.space);
        let proj = |r: &DensityMatrix| -> C64 {
            let (u, v) = (m.basis.vector(Polariton::UpA), m.basis.vector(Polariton::LpA));
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    acc += u[i] * v[j] * r.matrix()[(idx[i], idx[j])];
                }
            }
            acc
        };
        for &t in &[0.3, 1.1, 2.5] {
            let r = propagate(&m.liouvillian, &rho, t, Method::Exact).unwrap();
            let want = C64::from_polar(1.0, -omega * t);
            assert!((proj(&r) - want).norm() < 1e-10);
        }
    }
}
