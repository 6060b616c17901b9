use crate::Window;
use qdyn_core::units::C0_CM_PER_PS;
use qdyn_core::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

/// Sign of the exponent in `Σ s_k e^{±iωt_k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kernel {
    Plus,
    Minus,
}

/// Half `cos²` taper for free decays starting at `t = 0`; the first sample
/// is halved as in the trapezoid rule.
pub fn apodize(signal: &mut [C64], window: Window) {
    let n = signal.len();
    if n == 0 {
        return;
    }
    if window == Window::Cosine2 && n > 1 {
        for (k, s) in signal.iter_mut().enumerate() {
            let x = k as f64 / (n - 1) as f64;
            *s *= (0.5 * PI * x).cos().powi(2);
        }
    }
    signal[0] *= 0.5;
}

/// Transforms a uniformly sampled signal. Returns the centred wavenumber
/// axis (cm⁻¹, relative) and the spectrum, both of length `n * zero_pad`.
pub(crate) fn transform(signal: &[C64], dt: f64, zero_pad: usize, kernel: Kernel) -> (Vec<f64>, Vec<C64>) {
    let n = signal.len() * zero_pad.max(1);
    let mut buf = vec![C64::new(0.0, 0.0); n];
    buf[..signal.len()].copy_from_slice(signal);
    let mut planner = FftPlanner::new();
    let fft = match kernel {
        Kernel::Plus => planner.plan_fft_inverse(n),
        Kernel::Minus => planner.plan_fft_forward(n),
    };
    fft.process(&mut buf);
    let half = n / 2;
    let bin = 1.0 / (n as f64 * dt * C0_CM_PER_PS);
    let mut axis = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    // negative frequencies first so the axis increases
    for k in 0..n {
        let j = (k + n - half) % n;
        let f = if j >= n - half { j as f64 - n as f64 } else { j as f64 };
        axis.push(f * bin);
        out.push(buf[j] * dt);
    }
    (axis, out)
}

/// Subtracts the least-squares quadratic in `t` from a real trace.
pub fn detrend_quadratic(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 3 {
        let mean = x.iter().sum::<f64>() / n.max(1) as f64;
        return x.iter().map(|v| v - mean).collect();
    }
    // orthogonal polynomial basis on the sample points avoids a normal matrix
    let t: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 / (n - 1) as f64 - 1.0).collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for deg in 0..3 {
        let mut p: Vec<f64> = t.iter().map(|ti| ti.powi(deg)).collect();
        for q in &basis {
            let c = dot(&p, q);
            for (pi, qi) in p.iter_mut().zip(q) {
                *pi -= c * qi;
            }
        }
        let norm = dot(&p, &p).sqrt();
        p.iter_mut().for_each(|v| *v /= norm);
        basis.push(p);
    }
    let mut out = x.to_vec();
    for q in &basis {
        let c = dot(&out, q);
        for (o, qi) in out.iter_mut().zip(q) {
            *o -= c * qi;
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Full `cos²` (Hann) taper centred on the window.
pub(crate) fn hann(x: &mut [f64]) {
    let n = x.len();
    if n < 2 {
        return;
    }
    for (k, v) in x.iter_mut().enumerate() {
        let u = k as f64 / (n - 1) as f64 - 0.5;
        *v *= (PI * u).cos().powi(2);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Interpolated position on the axis.
    pub position: f64,
    pub height: f64,
    pub index: usize,
}

/// Local maxima of `values` above `rel` times the global maximum, with
/// three-point parabolic refinement of the position.
pub fn find_peaks(axis: &[f64], values: &[f64], rel: f64) -> Vec<Peak> {
    let max = values.iter().copied().fold(0.0, f64::max);
    let n = values.len();
    let mut out = Vec::new();
    for i in 1..n.saturating_sub(1) {
        let v = values[i];
        if v >= rel * max && v > values[i - 1] && v >= values[i + 1] {
            out.push(refine(axis, values, i));
        }
    }
    out
}

fn refine(axis: &[f64], values: &[f64], i: usize) -> Peak {
    let (a, b, c) = (values[i - 1], values[i], values[i + 1]);
    let denom = a - 2.0 * b + c;
    let shift = if denom.abs() > 0.0 { 0.5 * (a - c) / denom } else { 0.0 };
    let step = axis[i + 1] - axis[i];
    Peak {
        position: axis[i] + shift.clamp(-0.5, 0.5) * step,
        height: b - 0.25 * (a - c) * shift,
        index: i,
    }
}

/// Highest point of `values` restricted to `axis >= min_axis`.
pub fn dominant_peak(axis: &[f64], values: &[f64], min_axis: f64) -> Option<Peak> {
    let (mut best, mut idx) = (f64::NEG_INFINITY, None);
    for i in 0..values.len() {
        if axis[i] >= min_axis && values[i] > best {
            best = values[i];
            idx = Some(i);
        }
    }
    let i = idx?;
    if i == 0 || i + 1 == values.len() {
        return Some(Peak {
            position: axis[i],
            height: values[i],
            index: i,
        });
    }
    Some(refine(axis, values, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_tone_lands_on_its_bin() {
        let dt = 0.05;
        let nu = 37.0;
        let w = 2.0 * PI * C0_CM_PER_PS * nu;
        let s: Vec<C64> = (0..161).map(|k| C64::from_polar(1.0, -w * k as f64 * dt)).collect();
        let (axis, spec) = transform(&s, dt, 4, Kernel::Plus);
        let mag: Vec<f64> = spec.iter().map(|z| z.norm()).collect();
        let p = dominant_peak(&axis, &mag, f64::NEG_INFINITY).unwrap();
        assert!((p.position - nu).abs() < 0.5 * (axis[1] - axis[0]));
        assert!(axis.windows(2).all(|w| w[1] > w[0]));
        let (_, spec) = transform(&s, dt, 4, Kernel::Minus);
        let mag: Vec<f64> = spec.iter().map(|z| z.norm()).collect();
        let p = dominant_peak(&axis, &mag, f64::NEG_INFINITY).unwrap();
        assert!((p.position + nu).abs() < 0.5 * (axis[1] - axis[0]));
    }

    #[test]
    fn detrend_removes_quadratics() {
        let x: Vec<f64> = (0..50).map(|k| 3.0 - 0.2 * k as f64 + 0.01 * (k * k) as f64).collect();
        assert!(detrend_quadratic(&x).iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn peaks_above_threshold() {
        let axis: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let v: Vec<f64> = axis
            .iter()
            .map(|x| (-(x - 20.0f64).powi(2) / 4.0).exp() + 0.05 * (-(x - 50.0f64).powi(2)).exp() + 0.5 * (-(x - 70.3f64).powi(2) / 8.0).exp())
            .collect();
        let p = find_peaks(&axis, &v, 0.1);
        assert_eq!(p.len(), 2);
        assert!((p[1].position - 70.3).abs() < 0.1);
    }
}
