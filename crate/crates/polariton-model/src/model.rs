use crate::{polariton_basis, ModelParams, PolaritonBasis, Result};
use qdyn_core::units::wavenumber_to_angular;
use qdyn_core::{liouvillian, Factor, FactorOp, HilbertSpace, Operator, Superoperator};
use std::sync::Arc;

pub const PHOTON_A: usize = 0;
pub const PHOTON_B: usize = 1;
pub const VIB_A: usize = 2;
pub const VIB_B: usize = 3;

fn space(p: &ModelParams) -> Arc<HilbertSpace> {
    Arc::new(
        HilbertSpace::new(&[
            Factor::Boson(p.n_max),
            Factor::Boson(p.n_max),
            Factor::TwoLevel,
            Factor::TwoLevel,
        ])
        .expect("cutoff validated"),
    )
}

fn op(s: &Arc<HilbertSpace>, index: usize, kind: FactorOp) -> Operator {
    Operator::factor(s, index, kind).expect("fixed factor layout")
}

fn hamiltonian_on(s: &Arc<HilbertSpace>, p: &ModelParams) -> Operator {
    let w = |nu: f64| wavenumber_to_angular(nu - p.frame);
    let g = wavenumber_to_angular(p.g);
    let mut h = Operator::zeros(s);
    for (photon, vib, omega) in [(PHOTON_A, VIB_A, p.omega_a), (PHOTON_B, VIB_B, p.omega_b)] {
        let a = op(s, photon, FactorOp::Lower);
        let sm = op(s, vib, FactorOp::SigmaMinus);
        let ad = a.dagger();
        let sp = sm.dagger();
        h = &h + &(&ad * &a).scale(w(omega));
        h = &h + &(&sp * &sm).scale(w(p.omega_0));
        h = &h + &(&(&ad * &sm) + &(&sp * &a)).scale(g);
    }
    h
}

/// Tavis–Cummings Hamiltonian in the rotating frame, rad/ps.
pub fn build_hamiltonian(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    Ok(hamiltonian_on(&space(p), p))
}

fn drive_on(s: &Arc<HilbertSpace>, p: &ModelParams) -> Operator {
    let lower = drive_lowering_on(s, p);
    &lower + &lower.dagger()
}

fn drive_lowering_on(s: &Arc<HilbertSpace>, p: &ModelParams) -> Operator {
    &op(s, PHOTON_A, FactorOp::Lower).scale(p.mu_a) + &op(s, PHOTON_B, FactorOp::Lower).scale(p.mu_b)
}

/// Field coupling `V = Σ μ_i (a_i + a_i†)`.
pub fn drive_operator(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    Ok(drive_on(&space(p), p))
}

/// Annihilating half of the drive, `Σ μ_i a_i`.
pub fn drive_lowering(p: &ModelParams) -> Result<Operator> {
    p.validate()?;
    Ok(drive_lowering_on(&space(p), p))
}

fn jumps_on(s: &Arc<HilbertSpace>, p: &ModelParams) -> Vec<Operator> {
    let a_a = op(s, PHOTON_A, FactorOp::Lower);
    let a_b = op(s, PHOTON_B, FactorOp::Lower);
    let g = &p.gamma;
    let mut out = vec![
        a_a.scale(g[0].sqrt()),
        a_b.scale(g[1].sqrt()),
        op(s, VIB_A, FactorOp::SigmaMinus).scale(g[2].sqrt()),
        op(s, VIB_B, FactorOp::SigmaMinus).scale(g[3].sqrt()),
        (&a_b.dagger() * &a_a).scale(g[4].sqrt()),
    ];
    if p.gamma_phi > 0.0 {
        let diff = &(&a_a.dagger() * &a_a) - &(&a_b.dagger() * &a_b);
        out.push(diff.scale(p.gamma_phi.sqrt()));
    }
    out
}

/// `[F₁ … F₅]`, plus the inter-cavity dephasing jump when `gamma_phi > 0`.
pub fn jump_operators(p: &ModelParams) -> Result<Vec<Operator>> {
    p.validate()?;
    Ok(jumps_on(&space(p), p))
}

/// Total excitation number `Σ a†a + Σ σ⁺σ⁻`.
pub fn excitation_number(s: &Arc<HilbertSpace>) -> Operator {
    let mut n = Operator::zeros(s);
    for (idx, kind) in [
        (PHOTON_A, FactorOp::Number),
        (PHOTON_B, FactorOp::Number),
    ] {
        n = &n + &op(s, idx, kind);
    }
    for idx in [VIB_A, VIB_B] {
        let sm = op(s, idx, FactorOp::SigmaMinus);
        n = &n + &(&sm.dagger() * &sm);
    }
    n
}

/// Every operator of one parameter set, built on a shared space.
#[derive(Debug, Clone)]
pub struct Model {
    pub params: ModelParams,
    pub space: Arc<HilbertSpace>,
    pub hamiltonian: Operator,
    pub drive: Operator,
    pub drive_lowering: Operator,
    pub jumps: Vec<Operator>,
    pub liouvillian: Superoperator,
    pub basis: PolaritonBasis,
}

impl Model {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        let s = space(&params);
        let hamiltonian = hamiltonian_on(&s, &params);
        let drive = drive_on(&s, &params);
        let drive_lowering = drive_lowering_on(&s, &params);
        let jumps = jumps_on(&s, &params);
        let liouvillian = liouvillian(&hamiltonian, &jumps)?;
        let basis = polariton_basis(&params)?;
        Ok(Self {
            params,
            space: s,
            hamiltonian,
            drive,
            drive_lowering,
            jumps,
            liouvillian,
            basis,
        })
    }

    /// Drive lowering operator restricted to one cavity's photon mode.
    pub fn sector_lowering(&self, sector: crate::Sector) -> Operator {
        let (idx, mu) = match sector {
            crate::Sector::A => (PHOTON_A, self.params.mu_a),
            crate::Sector::B => (PHOTON_B, self.params.mu_b),
        };
        op(&self.space, idx, FactorOp::Lower).scale(mu)
    }

    pub fn excitation_number(&self) -> Operator {
        excitation_number(&self.space)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdyn_core::{propagate, DensityMatrix, Method, C64};

    fn state(s: &Arc<HilbertSpace>, digits: [usize; 4]) -> qdyn_core::CVec {
        let mut v = qdyn_core::CVec::zeros(s.dim());
        v[s.index_of(&digits)] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn hamiltonian_conserves_excitations() {
        let p = ModelParams::default();
        let h = build_hamiltonian(&p).unwrap();
        let n = excitation_number(h.space());
        let c = h.commutator(&n).unwrap();
        assert!(c.max_abs() < 1e-12);
        h.check_hermitian().unwrap();
        assert_eq!(h.dim(), 36);
    }

    #[test]
    fn sectors_do_not_mix() {
        let h = build_hamiltonian(&ModelParams::default()).unwrap();
        let s = h.space().clone();
        let a_side = [state(&s, [1, 0, 0, 0]), state(&s, [0, 0, 1, 0])];
        let b_side = [state(&s, [0, 1, 0, 0]), state(&s, [0, 0, 0, 1])];
        for x in &a_side {
            for y in &b_side {
                let m = (y.adjoint() * h.matrix() * x)[(0, 0)];
                assert_eq!(m, C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn drive_properties() {
        let mut p = ModelParams::default();
        p.mu_a = 1.0;
        p.mu_b = 0.0;
        let v = drive_operator(&p).unwrap();
        assert_eq!(v.hermitian_deviation(), 0.0);
        let s = v.space().clone();
        let nb = Operator::factor(&s, PHOTON_B, FactorOp::Number).unwrap();
        assert_eq!(v.commutator(&nb).unwrap().max_abs(), 0.0);
        let el = (state(&s, [1, 0, 0, 0]).adjoint() * v.matrix() * state(&s, [0, 0, 0, 0]))[(0, 0)];
        assert_eq!(el, C64::new(1.0, 0.0));
    }

    #[test]
    fn transfer_jump_is_one_way() {
        let mut p = ModelParams::default();
        p.gamma[4] = 0.7;
        let f = jump_operators(&p).unwrap();
        assert_eq!(f.len(), 5);
        let s = f[4].space().clone();
        let out = f[4].matrix() * state(&s, [1, 0, 0, 0]);
        let want = state(&s, [0, 1, 0, 0]) * C64::new(0.7f64.sqrt(), 0.0);
        assert!((out - want).norm() < 1e-15);
        let back = f[4].matrix() * state(&s, [0, 1, 0, 0]);
        assert_eq!(back.norm(), 0.0);
    }

    #[test]
    fn zero_rates_kept_and_dephasing_optional() {
        let mut p = ModelParams::default();
        p.gamma = [0.0, 0.3, 0.0, 0.0, 0.0];
        let f = jump_operators(&p).unwrap();
        assert_eq!(f.len(), 5);
        assert_eq!(f[0].max_abs(), 0.0);
        p.gamma_phi = 0.2;
        assert_eq!(jump_operators(&p).unwrap().len(), 6);
    }

    #[test]
    fn full_model_is_trace_preserving() {
        let mut p = ModelParams::default();
        p.gamma_phi = 0.05;
        let m = Model::new(p).unwrap();
        assert_eq!(m.liouvillian.matrix().nrows(), 1296);
        assert!(m.liouvillian.trace_residual() < 1e-12);
    }

    #[test]
    fn photon_transfer_is_monotone() {
        let mut p = ModelParams::default();
        p.gamma = [0.0, 0.0, 0.0, 0.0, 0.8];
        p.g = 0.0;
        let m = Model::new(p).unwrap();
        let rho0 = DensityMatrix::basis(&m.space, m.space.index_of(&[1, 0, 0, 0])).unwrap();
        let na = Operator::factor(&m.space, PHOTON_A, FactorOp::Number).unwrap();
        let nb = Operator::factor(&m.space, PHOTON_B, FactorOp::Number).unwrap();
        let mut last = 1.0;
        for k in 1..=20 {
            let r = propagate(&m.liouvillian, &rho0, 0.25 * k as f64, Method::Exact).unwrap();
            let a = qdyn_core::expectation(&na, &r).unwrap().re;
            let b = qdyn_core::expectation(&nb, &r).unwrap().re;
            assert!(a <= last + 1e-12);
            assert!((a + b - 1.0).abs() < 1e-10);
            last = a;
        }
        assert!(last < 0.02);
    }
}
