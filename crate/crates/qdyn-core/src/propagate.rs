use crate::superop::{from_vec, to_vec};
use crate::{CMat, CVec, DensityMatrix, QdynError, Result, Superoperator, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Matrix exponential of each invariant block.
    Exact,
    /// Classical fourth-order Runge–Kutta. The interval is split into
    /// `ceil(t/dt)` equal steps.
    Rk4 { dt: f64 },
}

fn gather(v: &CVec, block: &[usize]) -> CVec {
    CVec::from_iterator(block.len(), block.iter().map(|&i| v[i]))
}

fn scatter(v: &mut CVec, block: &[usize], part: &CVec) {
    for (k, &i) in block.iter().enumerate() {
        v[i] = part[k];
    }
}

fn rk4_block(m: &CMat, x: &mut CVec, h: f64, steps: usize) {
    let h = C64::new(h, 0.0);
    let half = C64::new(0.5, 0.0);
    for _ in 0..steps {
        let k1 = m * &*x;
        let k2 = m * (&*x + &k1 * (h * half));
        let k3 = m * (&*x + &k2 * (h * half));
        let k4 = m * (&*x + &k3 * h);
        *x += (k1 + (k2 + k3) * C64::new(2.0, 0.0) + k4) * (h / C64::new(6.0, 0.0));
    }
}

/// Evolves `ρ` for time `t` under the generator of `l`.
pub fn propagate(
    l: &Superoperator,
    rho: &DensityMatrix,
    t: f64,
    method: Method,
) -> Result<DensityMatrix> {
    if rho.space() != l.space() {
        return Err(QdynError::SpaceMismatch);
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(QdynError::InvalidTime(format!("t = {t} must be finite and >= 0")));
    }
    if t == 0.0 {
        return Ok(rho.clone());
    }
    let d = rho.dim();
    let mut v = to_vec(rho.matrix());
    match method {
        Method::Exact => {
            for b in l.blocks() {
                let x = gather(&v, b);
                if x.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                    continue;
                }
                let e = (l.block_matrix(b) * C64::new(t, 0.0)).exp();
                scatter(&mut v, b, &(e * x));
            }
        }
        Method::Rk4 { dt } => {
            if !(dt > 0.0) || dt > t {
                return Err(QdynError::InvalidTime(format!(
                    "RK4 step {dt} must satisfy 0 < dt <= t = {t}"
                )));
            }
            let steps = (t / dt - 1e-9).ceil().max(1.0) as usize;
            let h = t / steps as f64;
            for b in l.blocks() {
                let mut x = gather(&v, b);
                if x.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                    continue;
                }
                rk4_block(&l.block_matrix(b), &mut x, h, steps);
                scatter(&mut v, b, &x);
            }
        }
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(QdynError::NonFinite);
    }
    Ok(rho.with_matrix(from_vec(&v, d)))
}

/// Cached one-step propagator `exp(M dt)` for repeated use on a uniform grid.
///
/// Stored per invariant block; applying it or its transpose costs one small
/// matrix-vector product per block.
#[derive(Debug, Clone)]
pub struct StepPropagator {
    dim: usize,
    dt: f64,
    blocks: Vec<(Vec<usize>, CMat)>,
}

impl StepPropagator {
    pub fn new(l: &Superoperator, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(QdynError::InvalidTime(format!("step {dt} must be > 0")));
        }
        let blocks = l
            .blocks()
            .iter()
            .map(|b| {
                let e = (l.block_matrix(b) * C64::new(dt, 0.0)).exp();
                (b.clone(), e)
            })
            .collect::<Vec<_>>();
        for (_, e) in &blocks {
            if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(QdynError::NonFinite);
            }
        }
        Ok(Self {
            dim: l.space().dim(),
            dt,
            blocks,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Length of the vectorized state (`dim²`).
    pub fn len(&self) -> usize {
        self.dim * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    /// `v ← exp(M dt) v`.
    pub fn apply(&self, v: &mut CVec) {
        for (b, e) in &self.blocks {
            let x = gather(v, b);
            if x.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            scatter(v, b, &(e * x));
        }
    }

    /// `v ← exp(M dt)ᵀ v`, used to pull detection functionals backwards.
    pub fn apply_transpose(&self, v: &mut CVec) {
        for (b, e) in &self.blocks {
            let x = gather(v, b);
            if x.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            scatter(v, b, &(e.tr_mul(&x)));
        }
    }

    /// Vectorizes a density matrix in the propagator's convention.
    pub fn vectorize(&self, rho: &CMat) -> CVec {
        to_vec(rho)
    }

    pub fn unvectorize(&self, v: &CVec) -> CMat {
        from_vec(v, self.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{liouvillian, Factor, FactorOp, HilbertSpace, Operator, StateKind};
    use std::sync::Arc;

    fn decay(gamma: f64, omega: f64) -> (Arc<HilbertSpace>, Superoperator) {
        let s = Arc::new(HilbertSpace::new(&[Factor::TwoLevel]).unwrap());
        let sm = Operator::factor(&s, 0, FactorOp::SigmaMinus).unwrap();
        let h = (&sm.dagger() * &sm).scale(omega);
        let l = liouvillian(&h, &[sm.scale(gamma.sqrt())]).unwrap();
        (s, l)
    }

    fn excited_superposition(s: &Arc<HilbertSpace>) -> DensityMatrix {
        let a = C64::new(0.6, 0.0);
        let b = C64::new(0.8, 0.0);
        DensityMatrix::pure(s, &[a, b]).unwrap()
    }

    #[test]
    fn two_level_amplitude_damping() {
        let (s, l) = decay(1.0, 3.0);
        let rho0 = excited_superposition(&s);
        for &t in &[0.5, 2.0, 3.7] {
            let r = propagate(&l, &rho0, t, Method::Exact).unwrap();
            let pe = r.matrix()[(1, 1)].re;
            assert!((pe - 0.64 * (-t).exp()).abs() < 1e-12);
            let coh = r.matrix()[(0, 1)].norm();
            assert!((coh - 0.48 * (-t / 2.0).exp()).abs() < 1e-12);
        }
        let excited = DensityMatrix::basis(&s, 1).unwrap();
        let r = propagate(&l, &excited, 2.0, Method::Exact).unwrap();
        assert!((r.matrix()[(1, 1)].re - (-2.0f64).exp()).abs() < 1e-8);
        assert!((r.matrix()[(1, 1)].re - 0.13534).abs() < 1e-5);
    }

    #[test]
    fn zero_time_is_identity() {
        let (s, l) = decay(1.0, 3.0);
        let rho0 = excited_superposition(&s);
        assert_eq!(propagate(&l, &rho0, 0.0, Method::Exact).unwrap(), rho0);
        assert_eq!(
            propagate(&l, &rho0, 0.0, Method::Rk4 { dt: 0.1 }).unwrap(),
            rho0
        );
    }

    #[test]
    fn argument_errors() {
        let (s, l) = decay(1.0, 3.0);
        let rho0 = excited_superposition(&s);
        assert!(propagate(&l, &rho0, -1.0, Method::Exact).is_err());
        assert!(propagate(&l, &rho0, 1.0, Method::Rk4 { dt: 0.0 }).is_err());
        assert!(propagate(&l, &rho0, 1.0, Method::Rk4 { dt: 2.0 }).is_err());
        let other = Arc::new(HilbertSpace::new(&[Factor::Boson(1)]).unwrap());
        let r = DensityMatrix::basis(&other, 0).unwrap();
        assert_eq!(
            propagate(&l, &r, 1.0, Method::Exact),
            Err(QdynError::SpaceMismatch)
        );
    }

    #[test]
    fn rk4_is_fourth_order() {
        let (s, l) = decay(1.0, 3.0);
        let rho0 = excited_superposition(&s);
        let exact = propagate(&l, &rho0, 2.0, Method::Exact).unwrap();
        let err = |dt: f64| {
            let r = propagate(&l, &rho0, 2.0, Method::Rk4 { dt }).unwrap();
            (r.matrix() - exact.matrix()).norm()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }

    #[test]
    fn kind_is_preserved() {
        let (s, l) = decay(0.5, 1.0);
        let rho = excited_superposition(&s).into_branch();
        let r = propagate(&l, &rho, 1.0, Method::Exact).unwrap();
        assert_eq!(r.kind(), StateKind::PerturbativeBranch);
    }

    #[test]
    fn step_propagator_matches_exact() {
        let (s, l) = decay(0.8, 2.0);
        let rho0 = excited_superposition(&s);
        let p = StepPropagator::new(&l, 0.1).unwrap();
        let mut v = p.vectorize(rho0.matrix());
        for _ in 0..7 {
            p.apply(&mut v);
        }
        let exact = propagate(&l, &rho0, 0.7, Method::Exact).unwrap();
        assert!((p.unvectorize(&v) - exact.matrix()).norm() < 1e-12);

        // ⟨d, P x⟩ = ⟨Pᵀ d, x⟩
        let x = p.vectorize(rho0.matrix());
        let mut px = x.clone();
        p.apply(&mut px);
        let d = CVec::from_fn(4, |i, _| C64::new(i as f64, 1.0 - i as f64));
        let mut ptd = d.clone();
        p.apply_transpose(&mut ptd);
        let lhs = d.transpose() * px;
        let rhs = ptd.transpose() * x;
        assert!((lhs[(0, 0)] - rhs[(0, 0)]).norm() < 1e-13);
    }
}
