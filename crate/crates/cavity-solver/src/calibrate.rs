use crate::modes::bright_search;
use crate::{bright_pair, CavityError, CavityGeometry, ModeSolution, Result, SolveOptions};
use nalgebra::DMatrix;
use qdyn_core::units::angular_to_wavenumber;

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrateOptions {
    pub solve: SolveOptions,
    /// Acceptable |solved − target| per mode in cm⁻¹ before `delta_d` is freed.
    pub tol_cm: f64,
    /// Search interval for `delta_d` in μm.
    pub delta_range: (f64, f64),
    /// Points of the coarse `delta_d` scan.
    pub coarse_points: usize,
    /// Final bracket width for `delta_d` in μm.
    pub delta_tol: f64,
    pub max_evals: usize,
}

impl Default for CalibrateOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            tol_cm: 1.0,
            delta_range: (-2.0, 3.0),
            coarse_points: 11,
            delta_tol: 2e-3,
            max_evals: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationStage {
    /// Only `c_eff` was adjusted.
    SpeedOnly,
    /// `c_eff` and `delta_d` were adjusted together.
    Joint,
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub geometry: CavityGeometry,
    pub stage: CalibrationStage,
    pub targets: (f64, f64),
    /// Solved bright frequencies (A, B) in cm⁻¹ at the fitted geometry.
    pub solved: (f64, f64),
    /// `solved − target` per mode, cm⁻¹.
    pub residuals: (f64, f64),
    pub evaluations: usize,
    pub mode_a: ModeSolution,
    pub mode_b: ModeSolution,
}

impl Calibration {
    pub fn max_residual(&self) -> f64 {
        self.residuals.0.abs().max(self.residuals.1.abs())
    }
}

struct Eval {
    delta: f64,
    c: f64,
    cost: f64,
    res: (f64, f64),
    modes: Option<(ModeSolution, ModeSolution)>,
}

struct Fitter<'a> {
    base: &'a CavityGeometry,
    targets: (f64, f64),
    opts: &'a CalibrateOptions,
    warm: Option<DMatrix<f64>>,
    evals: usize,
}

impl Fitter<'_> {
    /// Best `c_eff` at fixed `delta_d`, in closed form: frequencies scale
    /// linearly with the light speed.
    fn eval(&mut self, delta: f64) -> Result<Eval> {
        if self.evals >= self.opts.max_evals {
            return Err(CavityError::CalibrationFailed(self.opts.max_evals));
        }
        self.evals += 1;
        let mut g = self.base.clone();
        g.delta_d = delta;
        g.c_eff = 1.0;
        let found = bright_search(&g, 2, &self.opts.solve, self.warm.as_ref());
        let pair = match found {
            Ok((modes, block)) => {
                self.warm = Some(block);
                bright_pair(&modes)
            }
            Err(e @ (CavityError::TooFewBrightModes { .. } | CavityError::BrightOrdering(_))) => Err(e),
            Err(e) => return Err(e),
        };
        let Ok((a, b)) = pair else {
            return Ok(Eval {
                delta,
                c: f64::NAN,
                cost: f64::INFINITY,
                res: (f64::NAN, f64::NAN),
                modes: None,
            });
        };
        let fa = angular_to_wavenumber(a.eigenvalue.sqrt());
        let fb = angular_to_wavenumber(b.eigenvalue.sqrt());
        let (ta, tb) = self.targets;
        let c = (ta * fa + tb * fb) / (fa * fa + fb * fb);
        let res = (c * fa - ta, c * fb - tb);
        Ok(Eval {
            delta,
            c,
            cost: res.0 * res.0 + res.1 * res.1,
            res,
            modes: Some((a, b)),
        })
    }
}

/// Fits `c_eff` (then `delta_d` if needed) so that the two bright modes land
/// on `targets = (ν̃_A, ν̃_B)` in cm⁻¹.
pub fn calibrate_speed(
    geom: &CavityGeometry,
    targets: (f64, f64),
    opts: &CalibrateOptions,
) -> Result<Calibration> {
    geom.validate()?;
    let (ta, tb) = targets;
    if !(ta > 0.0 && tb > 0.0 && ta > tb) {
        return Err(CavityError::InvalidArgument {
            key: "targets",
            reason: format!("need positive targets with A > B, got ({ta}, {tb})"),
        });
    }
    let mut fit = Fitter {
        base: geom,
        targets,
        opts,
        warm: None,
        evals: 0,
    };
    let first = fit.eval(geom.delta_d)?;
    let within = |e: &Eval| e.res.0.abs() <= opts.tol_cm && e.res.1.abs() <= opts.tol_cm;
    if first.modes.is_some() && within(&first) {
        return finish(geom, first, CalibrationStage::SpeedOnly, targets, fit.evals);
    }

    let (lo, hi) = opts.delta_range;
    let k = opts.coarse_points.max(3);
    let mut best = first;
    let mut step = (hi - lo) / (k - 1) as f64;
    for i in 0..k {
        let e = fit.eval(lo + step * i as f64)?;
        if e.cost < best.cost {
            best = e;
        }
    }
    if best.modes.is_none() {
        return Err(CavityError::CalibrationFailed(fit.evals));
    }
    // golden-section refinement around the best coarse point
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = ((best.delta - step).max(lo), (best.delta + step).min(hi));
    let mut c = fit.eval(b - phi * (b - a))?;
    let mut d = fit.eval(a + phi * (b - a))?;
    while b - a > opts.delta_tol {
        if c.cost < d.cost {
            b = d.delta;
            d = c;
            c = fit.eval(b - phi * (b - a))?;
        } else {
            a = c.delta;
            c = d;
            d = fit.eval(a + phi * (b - a))?;
        }
        step = b - a;
    }
    let _ = step;
    for e in [c, d] {
        if e.cost < best.cost {
            best = e;
        }
    }
    finish(geom, best, CalibrationStage::Joint, targets, fit.evals)
}

fn finish(
    geom: &CavityGeometry,
    e: Eval,
    stage: CalibrationStage,
    targets: (f64, f64),
    evaluations: usize,
) -> Result<Calibration> {
    let (mut a, mut b) = e.modes.ok_or(CavityError::CalibrationFailed(evaluations))?;
    let mut g = geom.clone();
    g.delta_d = e.delta;
    g.c_eff = e.c;
    for m in [&mut a, &mut b] {
        m.freq = angular_to_wavenumber(e.c * m.eigenvalue.sqrt());
    }
    Ok(Calibration {
        geometry: g,
        stage,
        targets,
        solved: (a.freq, b.freq),
        residuals: e.res,
        evaluations,
        mode_a: a,
        mode_b: b,
    })
}
