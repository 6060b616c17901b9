use crate::{Result, SpectroError};
use polariton_model::{Model, Sector};
use qdyn_core::{CMat, CVec, DensityMatrix, Operator, QdynError, StepPropagator, C64};

/// One field interaction: `ρ → i(Vρ − ρV)`.
pub fn kick(rho: &DensityMatrix, v: &Operator) -> Result<DensityMatrix> {
    if rho.space() != v.space() {
        return Err(QdynError::SpaceMismatch.into());
    }
    let m = kick_matrix(rho.matrix(), v.matrix());
    Ok(DensityMatrix::branch(rho.space().clone(), m)?)
}

fn kick_matrix(rho: &CMat, v: &CMat) -> CMat {
    (v * rho - rho * v) * C64::new(0.0, 1.0)
}

/// Element mask keeping `|i⟩⟨j|` with `n_i − n_j = order`, where `n` is the
/// diagonal of the excitation-number operator.
pub fn coherence_order_projector(n_exc: &Operator, order: i64) -> CMat {
    let d = n_exc.dim();
    let n: Vec<i64> = (0..d).map(|i| n_exc.matrix()[(i, i)].re.round() as i64).collect();
    CMat::from_fn(d, d, |i, j| {
        if n[i] - n[j] == order {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Which photon modes are read out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    /// Both cavities, `V⁻ = μ_A a_A + μ_B a_B`.
    Full,
    /// A single cavity's emission.
    Sector(Sector),
}

/// Cached propagator and detection functionals for one model on one grid.
#[derive(Debug, Clone)]
pub struct Engine {
    step: StepPropagator,
    drive: CMat,
    /// `d_k` with `S(k dt) = d_kᵀ vec(ρ)`.
    probes: Vec<CVec>,
    dim: usize,
}

impl Engine {
    /// Builds the step propagator and `samples` detection functionals.
    pub fn new(model: &Model, dt: f64, samples: usize, detection: Detection) -> Result<Self> {
        if samples == 0 {
            return Err(SpectroError::InvalidArgument {
                key: "samples",
                reason: "need at least one sample".into(),
            });
        }
        let step = StepPropagator::new(&model.liouvillian, dt)?;
        let lower = match detection {
            Detection::Full => model.drive_lowering.clone(),
            Detection::Sector(s) => model.sector_lowering(s),
        };
        let mut d = step.vectorize(&lower.matrix().transpose());
        let mut probes = Vec::with_capacity(samples);
        probes.push(d.clone());
        for _ in 1..samples {
            step.apply_transpose(&mut d);
            probes.push(d.clone());
        }
        Ok(Self {
            step,
            drive: model.drive.matrix().clone(),
            probes,
            dim: model.space.dim(),
        })
    }

    pub fn dt(&self) -> f64 {
        self.step.dt()
    }

    pub fn samples(&self) -> usize {
        self.probes.len()
    }

    pub fn vectorize(&self, rho: &CMat) -> CVec {
        self.step.vectorize(rho)
    }

    pub fn unvectorize(&self, v: &CVec) -> CMat {
        self.step.unvectorize(v)
    }

    /// Advances a vectorized state by one step.
    pub fn step(&self, v: &mut CVec) {
        self.step.apply(v);
    }

    pub fn kick(&self, rho: &CMat) -> CMat {
        kick_matrix(rho, &self.drive)
    }

    /// Emitted field `S(k dt)`, `k < n`, of a state that starts free
    /// evolution now.
    pub fn emission(&self, rho: &CMat, n: usize) -> Vec<C64> {
        let v = self.vectorize(rho);
        // skip the zero entries once instead of in every dot product
        let nz: Vec<(usize, C64)> = v
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm_sqr() > 0.0)
            .map(|(i, z)| (i, *z))
            .collect();
        self.probes[..n.min(self.probes.len())]
            .iter()
            .map(|d| nz.iter().map(|&(i, z)| d[i] * z).sum())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}
