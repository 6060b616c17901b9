use crate::engine::{kick, Detection, Engine};
use crate::fft::{apodize, find_peaks, transform, Kernel, Peak};
use crate::{Result, ScanConfig};
use polariton_model::Model;
use qdyn_core::{DensityMatrix, C64};

/// Complex spectrum on an absolute wavenumber axis (cm⁻¹).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    pub axis: Vec<f64>,
    pub values: Vec<C64>,
}

impl Spectrum1D {
    pub fn magnitude(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn bin(&self) -> f64 {
        self.axis[1] - self.axis[0]
    }

    /// Peaks above `rel` of the maximum magnitude.
    pub fn peaks(&self, rel: f64) -> Vec<Peak> {
        find_peaks(&self.axis, &self.magnitude(), rel)
    }

    /// Index of the bin nearest `nu`.
    pub fn nearest(&self, nu: f64) -> usize {
        let i = ((nu - self.axis[0]) / self.bin()).round();
        i.clamp(0.0, (self.axis.len() - 1) as f64) as usize
    }

    /// Sum of `|S|` over bins within `half_width` of `nu`, times the bin width.
    pub fn band(&self, nu: f64, half_width: f64) -> f64 {
        self.axis
            .iter()
            .zip(&self.values)
            .filter(|(x, _)| (**x - nu).abs() <= half_width)
            .map(|(_, z)| z.norm())
            .sum::<f64>()
            * self.bin()
    }
}

/// First-order response `Tr(V⁻ e^{L t₁}[i[V, ρ_vac]])` over `t₁`, transformed
/// to frequency.
pub fn linear_spectrum(model: &Model, scan: &ScanConfig) -> Result<Spectrum1D> {
    scan.validate()?;
    let n = scan.samples(scan.t1_max);
    let eng = Engine::new(model, scan.dt, n, Detection::Full)?;
    let vac = DensityMatrix::basis(&model.space, 0)?;
    let rho = kick(&vac, &model.drive)?;
    let mut s = eng.emission(rho.matrix(), n);
    apodize(&mut s, scan.window);
    let (axis, values) = transform(&s, scan.dt, scan.zero_pad, Kernel::Plus);
    let frame = model.params.frame;
    Ok(Spectrum1D {
        axis: axis.into_iter().map(|x| x + frame).collect(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use polariton_model::{ModelParams, Polariton};

    #[test]
    fn four_peaks_at_polariton_frequencies() {
        let model = Model::new(ModelParams::default()).unwrap();
        let scan = ScanConfig::default();
        let s = linear_spectrum(&model, &scan).unwrap();
        let peaks = s.peaks(0.1);
        assert_eq!(peaks.len(), 4, "{peaks:?}");
        let mut want: Vec<f64> = Polariton::ALL.iter().map(|p| model.basis.freq(*p)).collect();
        want.sort_by(f64::total_cmp);
        for (p, w) in peaks.iter().zip(&want) {
            assert!((p.position - w).abs() < s.bin(), "{} vs {w}", p.position);
        }
    }

    #[test]
    fn uncoupled_shows_bare_cavities_only() {
        let p = ModelParams {
            g: 0.0,
            gamma: [0.2, 0.2, 0.0, 0.0, 0.5],
            ..Default::default()
        };
        let model = Model::new(p).unwrap();
        let s = linear_spectrum(&model, &ScanConfig::default()).unwrap();
        let peaks = s.peaks(0.1);
        assert_eq!(peaks.len(), 2, "{peaks:?}");
        assert!((peaks[0].position - 1971.4).abs() < s.bin());
        assert!((peaks[1].position - 1998.2).abs() < s.bin());
    }
}
