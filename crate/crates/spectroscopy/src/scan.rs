use crate::engine::{Detection, Engine};
use crate::fft::{apodize, detrend_quadratic, dominant_peak, hann, transform, Kernel, Peak};
use crate::{Result, ScanConfig, Spectrum1D, Window};
use polariton_model::{prepare_coherence, Model, Polariton};
use qdyn_core::{CMat, C64};

/// `ω₃` spectra along the waiting time. `values[(k, j)]` is the complex
/// signal at `t2_axis[k]` and `omega3_axis[j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceScan {
    pub omega3_axis: Vec<f64>,
    pub t2_axis: Vec<f64>,
    pub values: CMat,
    pub initial: (Polariton, Polariton),
    pub detection: Detection,
    pub window: Window,
}

impl CoherenceScan {
    pub fn magnitude(&self) -> nalgebra::DMatrix<f64> {
        self.values.map(|z| z.norm())
    }

    /// Index of the `ω₃` bin nearest `nu`.
    pub fn nearest(&self, nu: f64) -> usize {
        let a = &self.omega3_axis;
        let bin = a[1] - a[0];
        ((nu - a[0]) / bin).round().clamp(0.0, (a.len() - 1) as f64) as usize
    }

    /// Complex `t₂` trace at the bin nearest `omega3`.
    pub fn trace(&self, omega3: f64) -> Vec<C64> {
        let j = self.nearest(omega3);
        self.values.column(j).iter().copied().collect()
    }

    pub fn trace_magnitude(&self, omega3: f64) -> Vec<f64> {
        self.trace(omega3).iter().map(|z| z.norm()).collect()
    }

    /// Sum of `|S|` over all `t₂` and the `ω₃` bins within `half_width`.
    pub fn integrated(&self, omega3: f64, half_width: f64) -> f64 {
        let mut total = 0.0;
        for (j, w) in self.omega3_axis.iter().enumerate() {
            if (w - omega3).abs() <= half_width {
                total += self.values.column(j).iter().map(|z| z.norm()).sum::<f64>();
            }
        }
        total
    }

    pub fn max_magnitude(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Earliest `t₂` after which `|S(ω₃, t₂)|` stays below `1/e` of its
    /// maximum; `None` if the trace is still above at the end of the scan.
    pub fn decay_time(&self, omega3: f64) -> Option<f64> {
        let m = self.trace_magnitude(omega3);
        let peak = m.iter().copied().fold(0.0, f64::max);
        let limit = peak / std::f64::consts::E;
        let last = m.iter().rposition(|&v| v >= limit)?;
        if last + 1 >= m.len() {
            return None;
        }
        Some(self.t2_axis[last + 1])
    }
}

/// Evolves `|ket⟩⟨bra|` over `t₂`, then probes with one kick and reads the
/// emitted field over `t₃` at every waiting time.
pub fn coherence_scan(model: &Model, initial: (Polariton, Polariton), scan: &ScanConfig) -> Result<CoherenceScan> {
    coherence_scan_detected(model, initial, scan, Detection::Full)
}

/// As [`coherence_scan`], reading out only the chosen cavity.
pub fn coherence_scan_detected(
    model: &Model,
    initial: (Polariton, Polariton),
    scan: &ScanConfig,
    detection: Detection,
) -> Result<CoherenceScan> {
    scan.validate()?;
    let n2 = scan.samples(scan.t2_max);
    let n3 = scan.samples(scan.t3_max);
    let eng = Engine::new(model, scan.dt, n3, detection)?;
    let rho0 = prepare_coherence(&model.basis, initial.0, initial.1, &model.space)?;
    let mut v = eng.vectorize(rho0.matrix());
    let mut rows = Vec::with_capacity(n2);
    let mut axis = Vec::new();
    for k in 0..n2 {
        if k > 0 {
            eng.step(&mut v);
        }
        let probed = eng.kick(&eng.unvectorize(&v));
        let mut s = eng.emission(&probed, n3);
        apodize(&mut s, scan.window);
        let (ax, spec) = transform(&s, scan.dt, scan.zero_pad, Kernel::Plus);
        axis = ax;
        rows.push(spec);
    }
    let frame = model.params.frame;
    Ok(CoherenceScan {
        omega3_axis: axis.into_iter().map(|x| x + frame).collect(),
        t2_axis: (0..n2).map(|k| k as f64 * scan.dt).collect(),
        values: CMat::from_fn(n2, rows[0].len(), |k, j| rows[k][j]),
        initial,
        detection,
        window: scan.window,
    })
}

/// Beat spectrum of the `t₂` trace at the bin nearest `omega3`.
///
/// The real part of the trace carries the coherence phase.
pub fn beat_spectrum(scan: &CoherenceScan, omega3: f64, zero_pad: usize) -> Spectrum1D {
    let re: Vec<f64> = scan.trace(omega3).iter().map(|z| z.re).collect();
    let dt = scan.t2_axis.get(1).copied().unwrap_or(1.0) - scan.t2_axis[0];
    series_beats(&re, dt, scan.window, zero_pad)
}

/// Beat spectrum of a real series sampled every `dt` ps.
///
/// A quadratic background (population growth and decay) is removed before
/// tapering. The axis holds beat frequencies in cm⁻¹, symmetric about zero.
pub fn series_beats(x: &[f64], dt: f64, window: Window, zero_pad: usize) -> Spectrum1D {
    let mut x = detrend_quadratic(x);
    if window == Window::Cosine2 {
        hann(&mut x);
    }
    let s: Vec<C64> = x.into_iter().map(|v| C64::new(v, 0.0)).collect();
    let (axis, values) = transform(&s, dt, zero_pad, Kernel::Plus);
    Spectrum1D { axis, values }
}

/// Strongest beat above `min_freq` cm⁻¹.
pub fn dominant_beat(beats: &Spectrum1D, min_freq: f64) -> Option<Peak> {
    dominant_peak(&beats.axis, &beats.magnitude(), min_freq)
}
