use crate::{CavityError, Result};
use qdyn_core::units::C0_UM_PER_PS;
use serde::{Deserialize, Serialize};

/// Which cavity a point (or a mode) belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    A,
    B,
}

/// Checkerboard unit cell. Lengths in μm, `c_eff` in μm/ps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavityGeometry {
    pub cell: f64,
    pub square: f64,
    #[serde(rename = "d_A")]
    pub d_a: f64,
    #[serde(rename = "d_B")]
    pub d_b: f64,
    pub n: u32,
    pub c_eff: f64,
    pub delta_d: f64,
    pub grid: usize,
}

impl Default for CavityGeometry {
    fn default() -> Self {
        Self {
            cell: 100.0,
            square: 50.0,
            d_a: 12.5,
            d_b: 12.7,
            n: 4,
            c_eff: C0_UM_PER_PS,
            delta_d: 0.0,
            grid: 128,
        }
    }
}

fn bad(key: &'static str, reason: impl Into<String>) -> CavityError {
    CavityError::InvalidGeometry {
        key,
        reason: reason.into(),
    }
}

impl CavityGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.cell.is_finite() && self.cell > 0.0) {
            return Err(bad("cell", "must be a positive length in um"));
        }
        if (self.cell - 2.0 * self.square).abs() > 1e-12 * self.cell {
            return Err(bad("square", "cell must hold exactly two squares per side (cell = 2 * square)"));
        }
        for (key, v) in [("d_A", self.d_a), ("d_B", self.d_b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(key, "cavity depth must be positive (um)"));
            }
            if !(v + self.delta_d > 0.0) {
                return Err(bad("delta_d", "effective depth must stay positive"));
            }
        }
        if !(self.c_eff.is_finite() && self.c_eff > 0.0) {
            return Err(bad("c_eff", "light speed must be positive (um/ps)"));
        }
        if self.n == 0 {
            return Err(bad("n", "mode number must be >= 1"));
        }
        if self.grid < 16 || self.grid % 2 != 0 {
            return Err(bad("grid", "need an even number of points >= 16"));
        }
        Ok(())
    }

    /// Grid spacing in μm.
    pub fn spacing(&self) -> f64 {
        self.cell / self.grid as f64
    }

    /// Cell-centred coordinate of grid index `i`.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    pub fn region_at(&self, x: f64, y: f64) -> Region {
        let k = (x / self.square).floor() as i64 + (y / self.square).floor() as i64;
        if k.rem_euclid(2) == 0 {
            Region::A
        } else {
            Region::B
        }
    }

    /// Region of grid point `(ix, iy)`.
    pub fn region(&self, ix: usize, iy: usize) -> Region {
        self.region_at(self.coord(ix), self.coord(iy))
    }

    /// Effective depth of a region.
    pub fn depth(&self, r: Region) -> f64 {
        match r {
            Region::A => self.d_a + self.delta_d,
            Region::B => self.d_b + self.delta_d,
        }
    }

    /// Thickness map on the grid, indexed `ix + N * iy`.
    pub fn thickness_map(&self) -> Vec<f64> {
        let n = self.grid;
        let mut out = Vec::with_capacity(n * n);
        for iy in 0..n {
            for ix in 0..n {
                out.push(self.depth(self.region(ix, iy)));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkerboard_layout() {
        let g = CavityGeometry::default();
        g.validate().unwrap();
        assert_eq!(g.region_at(10.0, 10.0), Region::A);
        assert_eq!(g.region_at(60.0, 60.0), Region::A);
        assert_eq!(g.region_at(60.0, 10.0), Region::B);
        assert_eq!(g.region_at(10.0, 60.0), Region::B);
        let map = g.thickness_map();
        let a = map.iter().filter(|&&d| d == 12.5).count();
        assert_eq!(a, 128 * 128 / 2);
    }

    #[test]
    fn validation() {
        let mut g = CavityGeometry::default();
        g.grid = 15;
        assert!(g.validate().is_err());
        let mut g = CavityGeometry::default();
        g.square = 40.0;
        assert!(g.validate().is_err());
        let mut g = CavityGeometry::default();
        g.delta_d = -13.0;
        assert!(g.validate().is_err());
    }
}
