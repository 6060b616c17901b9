use crate::{CavityGeometry, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// `−∇² + (nπ/d(r))²` on the periodic cell, in μm⁻².
///
/// The light speed is kept out of the operator: eigenvalues `λ` map to
/// angular frequencies `ω = c_eff √λ`.
#[derive(Clone)]
pub struct Helmholtz {
    n: usize,
    h: f64,
    potential: Vec<f64>,
    c_eff: f64,
}

impl std::fmt::Debug for Helmholtz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Helmholtz")
            .field("n", &self.n)
            .field("h", &self.h)
            .field("c_eff", &self.c_eff)
            .finish()
    }
}

/// Five-point periodic operator for a validated geometry.
pub fn assemble_helmholtz(geom: &CavityGeometry) -> Result<Helmholtz> {
    geom.validate()?;
    let potential = geom
        .thickness_map()
        .into_iter()
        .map(|d| (geom.n as f64 * PI / d).powi(2))
        .collect();
    Ok(Helmholtz {
        n: geom.grid,
        h: geom.spacing(),
        potential,
        c_eff: geom.c_eff,
    })
}

impl Helmholtz {
    /// Number of unknowns, `N²`.
    pub fn size(&self) -> usize {
        self.n * self.n
    }

    pub fn grid(&self) -> usize {
        self.n
    }

    pub fn c_eff(&self) -> f64 {
        self.c_eff
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// `y = K x` for one vector, indices `ix + N iy`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        let inv_h2 = 1.0 / (self.h * self.h);
        for iy in 0..n {
            let up = if iy + 1 == n { 0 } else { iy + 1 };
            let down = if iy == 0 { n - 1 } else { iy - 1 };
            for ix in 0..n {
                let right = if ix + 1 == n { 0 } else { ix + 1 };
                let left = if ix == 0 { n - 1 } else { ix - 1 };
                let p = ix + n * iy;
                let lap = 4.0 * x[p] - x[right + n * iy] - x[left + n * iy] - x[ix + n * up] - x[ix + n * down];
                y[p] = lap * inv_h2 + self.potential[p] * x[p];
            }
        }
    }

    /// Applies the operator to every column.
    pub fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            self.apply(x.column(j).as_slice(), y.column_mut(j).as_mut_slice());
        }
        y
    }

    /// Dense matrix of the operator. Only sensible for small grids.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let m = self.size();
        let mut out = DMatrix::zeros(m, m);
        let mut e = vec![0.0; m];
        let mut col = vec![0.0; m];
        for j in 0..m {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            out.column_mut(j).copy_from_slice(&col);
            e[j] = 0.0;
        }
        out
    }

    /// Approximates `(K − λ_min)⁻¹`: the potential is replaced by its mean
    /// excess over its minimum, which sits just below the lowest modes.
    pub fn mean_field_preconditioner(&self) -> FourierPreconditioner {
        let mean = self.potential.iter().sum::<f64>() / self.potential.len() as f64;
        let min = self.potential.iter().copied().fold(f64::INFINITY, f64::min);
        // the small floor keeps the constant mode invertible on uniform cells
        FourierPreconditioner::new(self.n, self.h, mean - min + 1e-3 * mean)
    }
}

/// `(−∇²_h + s)⁻¹` applied in Fourier space.
pub struct FourierPreconditioner {
    n: usize,
    symbol: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FourierPreconditioner {
    pub fn new(n: usize, h: f64, shift: f64) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let s1: Vec<f64> = (0..n)
            .map(|k| 4.0 / (h * h) * (PI * k as f64 / n as f64).sin().powi(2))
            .collect();
        let mut symbol = Vec::with_capacity(n * n);
        for ky in 0..n {
            for kx in 0..n {
                symbol.push(1.0 / (s1[kx] + s1[ky] + shift));
            }
        }
        Self { n, symbol, fwd, inv }
    }

    fn transform_2d(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>, scratch: &mut Vec<Complex64>) {
        let n = self.n;
        // rows are contiguous in ix
        fft.process(buf);
        for ix in 0..n {
            for iy in 0..n {
                scratch[iy] = buf[ix + n * iy];
            }
            fft.process(&mut scratch[..n]);
            for iy in 0..n {
                buf[ix + n * iy] = scratch[iy];
            }
        }
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        self.transform_2d(&mut buf, &self.fwd, &mut scratch);
        for (b, s) in buf.iter_mut().zip(&self.symbol) {
            *b *= *s;
        }
        self.transform_2d(&mut buf, &self.inv, &mut scratch);
        let scale = 1.0 / (n * n) as f64;
        for (yi, b) in y.iter_mut().zip(&buf) {
            *yi = b.re * scale;
        }
    }

    pub fn apply_block(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut y = DMatrix::zeros(x.nrows(), x.ncols());
        for j in 0..x.ncols() {
            self.apply(x.column(j).as_slice(), y.column_mut(j).as_mut_slice());
        }
        y
    }
}
