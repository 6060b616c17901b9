use crate::engine::{coherence_order_projector, Detection, Engine};
use crate::fft::{apodize, transform, Kernel};
use crate::{Result, ScanConfig, SpectroError};
use polariton_model::Model;
use qdyn_core::{propagate, CMat, DensityMatrix, Method, C64};
use serde::{Deserialize, Serialize};

/// Which `t₁` coherence order is kept after the first interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pathway {
    /// Conjugate coherence during `t₁`; the `−ω₁` quadrant folded onto `+ω₁`.
    Rephasing,
    NonRephasing,
    /// Sum of both after folding.
    Total,
}

/// Third-order spectrum at fixed `t₂`. `values[(i, j)]` sits at
/// `(omega1_axis[i], omega3_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub omega1_axis: Vec<f64>,
    pub omega3_axis: Vec<f64>,
    pub values: CMat,
    pub t2: f64,
    pub pathway: Pathway,
}

impl Spectrum2D {
    pub fn magnitude(&self) -> nalgebra::DMatrix<f64> {
        self.values.map(|z| z.norm())
    }

    /// Largest `|S|` within a square box of half side `half_width` around
    /// `(w1, w3)`.
    pub fn box_max(&self, w1: f64, w3: f64, half_width: f64) -> f64 {
        let rows = indices_near(&self.omega1_axis, w1, half_width);
        let cols = indices_near(&self.omega3_axis, w3, half_width);
        let mut best = 0.0f64;
        for &i in &rows {
            for &j in &cols {
                best = best.max(self.values[(i, j)].norm());
            }
        }
        best
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn indices_near(axis: &[f64], x: f64, hw: f64) -> Vec<usize> {
    (0..axis.len()).filter(|&i| (axis[i] - x).abs() <= hw).collect()
}

/// Time-domain third-order signal `S(t₁, t₃)` at fixed `t₂` for one `t₁`
/// coherence order (`None` keeps both). Rows run over `t₁`.
pub(crate) fn response(model: &Model, t2: f64, scan: &ScanConfig, order: Option<i64>) -> Result<CMat> {
    let n1 = scan.samples(scan.t1_max);
    let n3 = scan.samples(scan.t3_max);
    let eng = Engine::new(model, scan.dt, n1.max(n3), Detection::Full)?;
    let vac = DensityMatrix::basis(&model.space, 0)?;
    let mut first = eng.kick(vac.matrix());
    if let Some(o) = order {
        first = first.component_mul(&coherence_order_projector(&model.excitation_number(), o));
    }
    let mut v1 = eng.vectorize(&first);
    let mut out = CMat::zeros(n1, n3);
    for i in 0..n1 {
        if i > 0 {
            eng.step(&mut v1);
        }
        let second = eng.kick(&eng.unvectorize(&v1));
        let waited = if t2 > 0.0 {
            let b = DensityMatrix::branch(model.space.clone(), second)?;
            propagate(&model.liouvillian, &b, t2, Method::Exact)?.into_matrix()
        } else {
            second
        };
        let third = eng.kick(&waited);
        for (j, s) in eng.emission(&third, n3).into_iter().enumerate() {
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

fn transform_2d(signal: &CMat, scan: &ScanConfig, k1: Kernel) -> (Vec<f64>, Vec<f64>, CMat) {
    let (n1, n3) = signal.shape();
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(n1);
    let mut axis3 = Vec::new();
    for i in 0..n1 {
        let mut r: Vec<C64> = signal.row(i).iter().copied().collect();
        apodize(&mut r, scan.window);
        let (ax, spec) = transform(&r, scan.dt, scan.zero_pad, Kernel::Plus);
        axis3 = ax;
        rows.push(spec);
    }
    let m3 = axis3.len();
    let mut axis1 = Vec::new();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(m3);
    for j in 0..m3 {
        let mut c: Vec<C64> = rows.iter().map(|r| r[j]).collect();
        apodize(&mut c, scan.window);
        let (ax, spec) = transform(&c, scan.dt, scan.zero_pad, k1);
        axis1 = ax;
        cols.push(spec);
    }
    let values = CMat::from_fn(axis1.len(), m3, |i, j| cols[j][i]);
    let _ = n3;
    (axis1, axis3, values)
}

/// 2D spectrum at waiting time `t2` (ps), both axes in absolute cm⁻¹.
pub fn third_order_2dir(model: &Model, t2: f64, scan: &ScanConfig, pathway: Pathway) -> Result<Spectrum2D> {
    scan.validate()?;
    if !(t2.is_finite() && t2 >= 0.0) {
        return Err(SpectroError::InvalidArgument {
            key: "t2",
            reason: format!("{t2} ps must be >= 0"),
        });
    }
    let frame = model.params.frame;
    let one = |order: i64, kernel: Kernel| -> Result<(Vec<f64>, Vec<f64>, CMat)> {
        let s = response(model, t2, scan, Some(order))?;
        Ok(transform_2d(&s, scan, kernel))
    };
    let (a1, a3, values) = match pathway {
        Pathway::Rephasing => one(-1, Kernel::Minus)?,
        Pathway::NonRephasing => one(1, Kernel::Plus)?,
        Pathway::Total => {
            let (a1, a3, r) = one(-1, Kernel::Minus)?;
            let (_, _, nr) = one(1, Kernel::Plus)?;
            (a1, a3, r + nr)
        }
    };
    Ok(Spectrum2D {
        omega1_axis: a1.into_iter().map(|x| x + frame).collect(),
        omega3_axis: a3.into_iter().map(|x| x + frame).collect(),
        values,
        t2,
        pathway,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use polariton_model::ModelParams;

    fn short() -> ScanConfig {
        ScanConfig {
            t1_max: 3.0,
            t3_max: 3.0,
            zero_pad: 2,
            ..Default::default()
        }
    }

    #[test]
    fn scales_as_fourth_power_of_mu() {
        let p = ModelParams::default();
        let q = ModelParams {
            mu_a: 1.7,
            mu_b: 1.7,
            ..p.clone()
        };
        let scan = ScanConfig { t1_max: 1.0, t3_max: 1.0, ..Default::default() };
        let a = response(&Model::new(p).unwrap(), 0.3, &scan, None).unwrap();
        let b = response(&Model::new(q).unwrap(), 0.3, &scan, None).unwrap();
        let rel = (&b - &a * C64::new(1.7f64.powi(4), 0.0)).norm() / b.norm();
        assert!(rel < 1e-12, "{rel}");
    }

    #[test]
    fn bare_harmonic_cavities_give_no_third_order_signal() {
        // with g = 0 the drive only sees two harmonic modes, whose nonlinear
        // pathways cancel exactly
        let bare = ModelParams {
            g: 0.0,
            gamma: [0.0; 5],
            ..Default::default()
        };
        let scan = ScanConfig { t1_max: 1.0, t3_max: 1.0, ..Default::default() };
        let a = response(&Model::new(bare).unwrap(), 0.5, &scan, None).unwrap();
        let b = response(&Model::new(ModelParams::default()).unwrap(), 0.5, &scan, None).unwrap();
        assert!(a.norm() < 1e-12 * b.norm(), "{} vs {}", a.norm(), b.norm());
    }

    #[test]
    fn negative_waiting_time_is_rejected() {
        let model = Model::new(ModelParams::default()).unwrap();
        assert!(third_order_2dir(&model, -0.1, &short(), Pathway::Total).is_err());
    }
}
