use crate::{
    assemble_helmholtz, lobpcg, CavityError, CavityGeometry, Eigenpairs, LobpcgOptions, Region,
    Result,
};
use nalgebra::DMatrix;
use qdyn_core::units::angular_to_wavenumber;
use std::f64::consts::PI;

/// Knobs of the mode search and the s-wave test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Number of lowest eigenpairs examined first.
    pub window: usize,
    /// Upper limit when the bright-mode search widens the window.
    pub max_window: usize,
    /// Extra block vectors carried along but not required to converge.
    pub guard: usize,
    /// Grid points trimmed from each square edge before testing signs.
    pub erode: usize,
    /// Minimum `|Σ E| / Σ |E|` inside each square of the dominant cavity.
    pub coherence: f64,
    pub lobpcg: LobpcgOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            window: 24,
            max_window: 96,
            guard: 8,
            erode: 2,
            coherence: 0.8,
            lobpcg: LobpcgOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    /// Position in the ascending eigenvalue list.
    pub index: usize,
    /// Wavenumber in cm⁻¹.
    pub freq: f64,
    /// Eigenvalue of the speed-free operator, μm⁻².
    pub eigenvalue: f64,
    /// `E(x_i, y_j)` at `(i, j)`, normalized so that `Σ E² h² = 1`.
    pub field: DMatrix<f64>,
    pub cell: f64,
    /// Region holding more than half of `∫E²`; `None` on an exact tie.
    pub dominant: Option<Region>,
    /// Fraction of `∫E²` inside cavity A.
    pub a_fraction: f64,
    /// Sign coherence `Σ E / Σ |E|` per square, ordered (0,0), (1,0), (0,1), (1,1).
    pub square_coherence: [f64; 4],
    pub s_wave: bool,
}

impl ModeSolution {
    pub fn grid(&self) -> usize {
        self.field.nrows()
    }

    pub fn spacing(&self) -> f64 {
        self.cell / self.grid() as f64
    }
}

/// Lowest plane waves of the periodic cell, used as the starting block.
fn plane_waves(n: usize, count: usize) -> DMatrix<f64> {
    let mut ks: Vec<(i64, i64)> = Vec::new();
    let r = (count as f64).sqrt().ceil() as i64 + 2;
    for kx in -r..=r {
        for ky in -r..=r {
            // one representative per ±k pair
            if kx > 0 || (kx == 0 && ky >= 0) {
                ks.push((kx, ky));
            }
        }
    }
    ks.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(count);
    'outer: for (kx, ky) in ks {
        for phase in [0.0, 0.5 * PI] {
            if kx == 0 && ky == 0 && phase != 0.0 {
                continue;
            }
            let mut v = Vec::with_capacity(n * n);
            for iy in 0..n {
                for ix in 0..n {
                    let arg = 2.0 * PI * (kx as f64 * (ix as f64 + 0.5) + ky as f64 * (iy as f64 + 0.5)) / n as f64;
                    v.push((arg + phase).cos());
                }
            }
            cols.push(v);
            if cols.len() == count {
                break 'outer;
            }
        }
    }
    DMatrix::from_fn(n * n, count, |i, j| cols[j][i])
}

/// Lowest `window` eigenpairs of the speed-free operator.
pub(crate) fn eigenpairs(
    geom: &CavityGeometry,
    opts: &SolveOptions,
    start: Option<&DMatrix<f64>>,
) -> Result<Eigenpairs> {
    let k = assemble_helmholtz(geom)?;
    let n = geom.grid;
    let block = (opts.window + opts.guard).min(n * n);
    let mut x0 = plane_waves(n, block);
    if let Some(s) = start.filter(|s| s.nrows() == n * n) {
        // a smaller block keeps the higher plane waves as fresh directions
        let k = s.ncols().min(block);
        x0.columns_mut(0, k).copy_from(&s.columns(0, k));
    }
    let pre = k.mean_field_preconditioner();
    lobpcg(
        |x| k.apply_block(x),
        |r| pre.apply_block(r),
        x0,
        opts.window.min(block),
        opts.lobpcg,
    )
}

/// Labels one eigenvector. `values` is indexed `ix + N iy`.
pub fn classify(geom: &CavityGeometry, values: &[f64], eigenvalue: f64, index: usize, opts: &SolveOptions) -> ModeSolution {
    let n = geom.grid;
    let h = geom.spacing();
    let norm = (values.iter().map(|v| v * v).sum::<f64>() * h * h).sqrt();
    let mut field = DMatrix::from_fn(n, n, |ix, iy| values[ix + n * iy] / norm);
    let total: f64 = field.iter().sum();
    let flip = if total.abs() > 1e-12 * field.amax() * (n * n) as f64 {
        total < 0.0
    } else {
        field.iter().fold((0.0f64, 0.0f64), |(m, s), &v| if v.abs() > m { (v.abs(), v) } else { (m, s) }).1 < 0.0
    };
    if flip {
        field.neg_mut();
    }

    let mut a_weight = 0.0;
    let mut all = 0.0;
    for iy in 0..n {
        for ix in 0..n {
            let w = field[(ix, iy)].powi(2);
            all += w;
            if geom.region(ix, iy) == Region::A {
                a_weight += w;
            }
        }
    }
    let a_fraction = a_weight / all;
    let dominant = if (a_fraction - 0.5).abs() < 1e-9 {
        None
    } else if a_fraction > 0.5 {
        Some(Region::A)
    } else {
        Some(Region::B)
    };

    let half = n / 2;
    let e = opts.erode.min(half / 2 - 1);
    let mut coherence = [0.0; 4];
    let mut sums = [0.0; 4];
    for (q, (sx, sy)) in [(0, 0), (1, 0), (0, 1), (1, 1)].into_iter().enumerate() {
        let (mut s, mut a) = (0.0, 0.0);
        for iy in sy * half + e..(sy + 1) * half - e {
            for ix in sx * half + e..(sx + 1) * half - e {
                s += field[(ix, iy)];
                a += field[(ix, iy)].abs();
            }
        }
        sums[q] = s;
        coherence[q] = if a > 0.0 { s / a } else { 0.0 };
    }
    // squares (0,0) and (1,1) are cavity A
    let squares: &[usize] = match dominant {
        Some(Region::A) => &[0, 3],
        Some(Region::B) => &[1, 2],
        None => &[0, 1, 2, 3],
    };
    let s_wave = squares.iter().all(|&q| coherence[q].abs() >= opts.coherence)
        && squares.iter().all(|&q| sums[q].signum() == sums[squares[0]].signum());

    ModeSolution {
        index,
        freq: angular_to_wavenumber(geom.c_eff * eigenvalue.sqrt()),
        eigenvalue,
        field,
        cell: geom.cell,
        dominant,
        a_fraction,
        square_coherence: coherence,
        s_wave,
    }
}

/// Every mode in the search window, ascending, with labels.
pub fn solve_modes(geom: &CavityGeometry, opts: &SolveOptions) -> Result<Vec<ModeSolution>> {
    solve_modes_from(geom, opts, None).map(|(m, _)| m)
}

/// Like [`solve_modes`], optionally warm-started; also returns the final
/// block for reuse on a nearby geometry.
pub(crate) fn solve_modes_from(
    geom: &CavityGeometry,
    opts: &SolveOptions,
    start: Option<&DMatrix<f64>>,
) -> Result<(Vec<ModeSolution>, DMatrix<f64>)> {
    let pairs = eigenpairs(geom, opts, start)?;
    let modes = pairs
        .values
        .iter()
        .enumerate()
        .map(|(i, &lam)| classify(geom, pairs.vectors.column(i).as_slice(), lam, i, opts))
        .collect();
    let block = (opts.window + opts.guard).min(geom.grid * geom.grid);
    let mut restart = plane_waves(geom.grid, block);
    restart.columns_mut(0, pairs.vectors.ncols()).copy_from(&pairs.vectors);
    Ok((modes, restart))
}

/// The lowest `count` modes passing the s-wave test, ascending in frequency.
///
/// The search window starts at `max(window, 4·count)` and doubles, up to
/// `max_window`, while too few bright modes are inside it.
pub fn solve_bright_modes(geom: &CavityGeometry, count: usize) -> Result<Vec<ModeSolution>> {
    bright_search(geom, count, &SolveOptions::default(), None).map(|(b, _)| b)
}

/// Every mode of the first search window holding `count` bright modes.
pub fn solve_mode_table(geom: &CavityGeometry, count: usize) -> Result<Vec<ModeSolution>> {
    widen(geom, count, &SolveOptions::default(), None).map(|(m, _)| m)
}

pub(crate) fn bright_search(
    geom: &CavityGeometry,
    count: usize,
    opts: &SolveOptions,
    start: Option<&DMatrix<f64>>,
) -> Result<(Vec<ModeSolution>, DMatrix<f64>)> {
    let (modes, restart) = widen(geom, count, opts, start)?;
    Ok((modes.into_iter().filter(|m| m.s_wave).take(count).collect(), restart))
}

fn widen(
    geom: &CavityGeometry,
    count: usize,
    opts: &SolveOptions,
    start: Option<&DMatrix<f64>>,
) -> Result<(Vec<ModeSolution>, DMatrix<f64>)> {
    if count < 2 {
        return Err(CavityError::InvalidArgument {
            key: "count",
            reason: "need at least two bright modes".into(),
        });
    }
    let mut o = *opts;
    o.window = o.window.max(4 * count).min(o.max_window.max(4 * count));
    let mut block = start.cloned();
    loop {
        let (modes, restart) = solve_modes_from(geom, &o, block.as_ref())?;
        let found = modes.iter().filter(|m| m.s_wave).count();
        if found >= count {
            return Ok((modes, restart));
        }
        if o.window >= o.max_window {
            return Err(CavityError::TooFewBrightModes {
                found,
                searched: o.window,
                wanted: count,
            });
        }
        o.window = (2 * o.window).min(o.max_window);
        block = Some(restart);
    }
}

/// Checks the lowest two bright modes and returns them as (A, B).
pub fn bright_pair(modes: &[ModeSolution]) -> Result<(ModeSolution, ModeSolution)> {
    if modes.len() < 2 {
        return Err(CavityError::BrightOrdering(format!("only {} modes", modes.len())));
    }
    let (lo, hi) = (&modes[0], &modes[1]);
    if lo.dominant != Some(Region::B) || hi.dominant != Some(Region::A) {
        return Err(CavityError::BrightOrdering(format!(
            "lower mode dominant {:?}, higher mode dominant {:?}",
            lo.dominant, hi.dominant
        )));
    }
    Ok((hi.clone(), lo.clone()))
}

/// `|E(x₀, y)|²` along the nearest grid column, scaled to unit maximum.
pub fn profile_cut(mode: &ModeSolution, x0: f64) -> Result<Vec<f64>> {
    if !(0.0..mode.cell).contains(&x0) {
        return Err(CavityError::InvalidArgument {
            key: "x0",
            reason: format!("{x0} um is outside [0, {})", mode.cell),
        });
    }
    let n = mode.grid();
    let ix = ((x0 / mode.spacing() - 0.5).round().max(0.0) as usize).min(n - 1);
    let col: Vec<f64> = (0..n).map(|iy| mode.field[(ix, iy)].powi(2)).collect();
    let max = col.iter().copied().fold(0.0, f64::max);
    Ok(if max > 0.0 { col.iter().map(|v| v / max).collect() } else { col })
}
