use crate::engine::Detection;
use crate::scan::coherence_scan_detected;
use crate::{linear_spectrum, Result, ScanConfig, SpectroError};
use cavity_solver::{profile_cut, ModeSolution, Region};
use nalgebra::DMatrix;
use polariton_model::{Model, Polariton, Sector};

/// Half width in cm⁻¹ of the band assigned to each polariton line.
pub const BAND_HALF_WIDTH: f64 = 5.0;
/// Largest accepted offset between a solved cavity mode and the model's bare
/// cavity frequency, cm⁻¹.
pub const MODE_MISMATCH_LIMIT: f64 = 5.0;
/// Margin around the outermost polaritons kept on the frequency axis, cm⁻¹.
const AXIS_MARGIN: f64 = 30.0;

/// Intensity over `(y, ν̃)`; `values[(i, j)]` sits at `(y_axis[i], omega_axis[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperspectralImage {
    pub y_axis: Vec<f64>,
    /// Cavity under the cut at each `y`.
    pub y_region: Vec<Region>,
    pub omega_axis: Vec<f64>,
    pub values: DMatrix<f64>,
    pub t2: Option<f64>,
}

impl HyperspectralImage {
    /// Sum of the column nearest `omega` over the rows in `region`.
    pub fn region_intensity(&self, omega: f64, region: Region) -> f64 {
        let j = nearest(&self.omega_axis, omega);
        (0..self.y_axis.len())
            .filter(|&i| self.y_region[i] == region)
            .map(|i| self.values[(i, j)])
            .sum()
    }

    /// Sum over every row in `region` and every column within the band of `omega`.
    pub fn region_band(&self, omega: f64, region: Region) -> f64 {
        let mut total = 0.0;
        for (j, w) in self.omega_axis.iter().enumerate() {
            if (w - omega).abs() <= BAND_HALF_WIDTH {
                for i in 0..self.y_axis.len() {
                    if self.y_region[i] == region {
                        total += self.values[(i, j)];
                    }
                }
            }
        }
        total
    }

    /// Profile along `y` at the column nearest `omega`.
    pub fn profile(&self, omega: f64) -> Vec<f64> {
        let j = nearest(&self.omega_axis, omega);
        self.values.column(j).iter().copied().collect()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

fn nearest(axis: &[f64], x: f64) -> usize {
    let bin = axis[1] - axis[0];
    ((x - axis[0]) / bin).round().clamp(0.0, (axis.len() - 1) as f64) as usize
}

struct Layout {
    y_axis: Vec<f64>,
    y_region: Vec<Region>,
    profile_a: Vec<f64>,
    profile_b: Vec<f64>,
}

fn layout(model: &Model, mode_a: &ModeSolution, mode_b: &ModeSolution, x0: f64) -> Result<Layout> {
    for (mode, bare) in [(mode_a, model.params.omega_a), (mode_b, model.params.omega_b)] {
        if (mode.freq - bare).abs() > MODE_MISMATCH_LIMIT {
            return Err(SpectroError::InconsistentInputs {
                mode: mode.freq,
                model: bare,
            });
        }
    }
    if mode_a.grid() != mode_b.grid() || mode_a.cell != mode_b.cell {
        return Err(SpectroError::InvalidArgument {
            key: "modes",
            reason: "modes come from different grids".into(),
        });
    }
    let profile_a = profile_cut(mode_a, x0)?;
    let profile_b = profile_cut(mode_b, x0)?;
    let h = mode_a.spacing();
    let w = 0.5 * mode_a.cell;
    let n = mode_a.grid();
    let ix = ((x0 / h - 0.5).round().max(0.0) as usize).min(n - 1);
    let x = (ix as f64 + 0.5) * h;
    let y_axis: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
    let y_region = y_axis
        .iter()
        .map(|y| {
            if ((x / w).floor() as i64 + (y / w).floor() as i64) % 2 == 0 {
                Region::A
            } else {
                Region::B
            }
        })
        .collect();
    Ok(Layout {
        y_axis,
        y_region,
        profile_a,
        profile_b,
    })
}

/// Frequency axis indices kept in the image.
fn crop(model: &Model, axis: &[f64]) -> Vec<usize> {
    let f: Vec<f64> = Polariton::ALL.iter().map(|p| model.basis.freq(*p)).collect();
    let lo = f.iter().copied().fold(f64::INFINITY, f64::min) - AXIS_MARGIN;
    let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max) + AXIS_MARGIN;
    (0..axis.len()).filter(|&j| axis[j] >= lo && axis[j] <= hi).collect()
}

/// Photon weight of polariton `p` and the index range of its band.
fn lines(model: &Model, axis: &[f64], cols: &[usize]) -> Vec<(Polariton, f64, Vec<usize>)> {
    Polariton::ALL
        .iter()
        .map(|&p| {
            let nu = model.basis.freq(p);
            let band = cols
                .iter()
                .enumerate()
                .filter(|(_, &j)| (axis[j] - nu).abs() <= BAND_HALF_WIDTH)
                .map(|(k, _)| k)
                .collect();
            (p, model.basis.hopfield(p).0, band)
        })
        .collect()
}

fn paint(
    lay: &Layout,
    lines: &[(Polariton, f64, Vec<usize>)],
    ncols: usize,
    lineshape: impl Fn(Polariton, usize) -> f64,
) -> DMatrix<f64> {
    let mut img = DMatrix::zeros(lay.y_axis.len(), ncols);
    for (p, weight, band) in lines {
        let prof = match p.sector() {
            Sector::A => &lay.profile_a,
            Sector::B => &lay.profile_b,
        };
        for &k in band {
            let l = weight * lineshape(*p, k);
            for (i, pr) in prof.iter().enumerate() {
                img[(i, k)] += pr * l;
            }
        }
    }
    img
}

/// Linear image: each polariton line, cut to its band, spread along `y` with
/// its cavity's mode profile and photon fraction. Scaled to unit maximum.
pub fn hyperspectral_linear(
    model: &Model,
    mode_a: &ModeSolution,
    mode_b: &ModeSolution,
    x0: f64,
    scan: &ScanConfig,
) -> Result<HyperspectralImage> {
    let lay = layout(model, mode_a, mode_b, x0)?;
    let spec = linear_spectrum(model, scan)?;
    let mag = spec.magnitude();
    let cols = crop(model, &spec.axis);
    let lines = lines(model, &spec.axis, &cols);
    let mut values = paint(&lay, &lines, cols.len(), |_, k| mag[cols[k]]);
    let max = values.max();
    if max > 0.0 {
        values /= max;
    }
    Ok(HyperspectralImage {
        y_axis: lay.y_axis,
        y_region: lay.y_region,
        omega_axis: cols.iter().map(|&j| spec.axis[j]).collect(),
        values,
        t2: None,
    })
}

/// One image per waiting time of a coherence scan started from `initial`.
///
/// Each cavity's lines take their magnitude from the scan read out through
/// that cavity alone. The whole stack shares one scale, so decay is visible.
pub fn hyperspectral_dynamics(
    model: &Model,
    mode_a: &ModeSolution,
    mode_b: &ModeSolution,
    x0: f64,
    initial: (Polariton, Polariton),
    scan: &ScanConfig,
) -> Result<Vec<HyperspectralImage>> {
    let lay = layout(model, mode_a, mode_b, x0)?;
    let sa = coherence_scan_detected(model, initial, scan, Detection::Sector(Sector::A))?;
    let sb = coherence_scan_detected(model, initial, scan, Detection::Sector(Sector::B))?;
    let cols = crop(model, &sa.omega3_axis);
    let lines = lines(model, &sa.omega3_axis, &cols);
    let omega_axis: Vec<f64> = cols.iter().map(|&j| sa.omega3_axis[j]).collect();
    let mut stack: Vec<HyperspectralImage> = sa
        .t2_axis
        .iter()
        .enumerate()
        .map(|(t, &t2)| {
            let values = paint(&lay, &lines, cols.len(), |p, k| {
                let s = match p.sector() {
                    Sector::A => &sa,
                    Sector::B => &sb,
                };
                s.values[(t, cols[k])].norm()
            });
            HyperspectralImage {
                y_axis: lay.y_axis.clone(),
                y_region: lay.y_region.clone(),
                omega_axis: omega_axis.clone(),
                values,
                t2: Some(t2),
            }
        })
        .collect();
    let max = stack.iter().map(|im| im.max()).fold(0.0, f64::max);
    if max > 0.0 {
        for im in &mut stack {
            im.values /= max;
        }
    }
    Ok(stack)
}
