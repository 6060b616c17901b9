use crate::{CMat, CVec, DensityMatrix, HilbertSpace, Operator, QdynError, Result, C64};
use std::sync::Arc;

/// Linear map on column-stacked density matrices.
///
/// The generator `M` satisfies `d vec(ρ)/dt = M vec(ρ)`. Index sets that `M`
/// never mixes are found once at construction so that exponentials can be
/// taken block by block.
#[derive(Debug, Clone)]
pub struct Superoperator {
    space: Arc<HilbertSpace>,
    matrix: CMat,
    blocks: Vec<Vec<usize>>,
}

/// Accumulates `s * (A ⊗ B)` into `m`, skipping zero entries.
fn add_kron(m: &mut CMat, a: &CMat, b: &CMat, s: C64) {
    let (da, db) = (a.nrows(), b.nrows());
    let nz_b: Vec<(usize, usize, C64)> = (0..db)
        .flat_map(|j| (0..db).map(move |i| (i, j)))
        .filter_map(|(i, j)| {
            let z = b[(i, j)];
            (z != C64::new(0.0, 0.0)).then_some((i, j, z))
        })
        .collect();
    for ja in 0..da {
        for ia in 0..da {
            let za = a[(ia, ja)];
            if za == C64::new(0.0, 0.0) {
                continue;
            }
            let f = za * s;
            for &(ib, jb, zb) in &nz_b {
                m[(ia * db + ib, ja * db + jb)] += f * zb;
            }
        }
    }
}

/// Connected components of the sparsity graph of a square matrix.
fn find_blocks(m: &CMat) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != C64::new(0.0, 0.0) {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[label[r]].push(i);
    }
    blocks
}

impl Superoperator {
    pub fn new(space: Arc<HilbertSpace>, matrix: CMat) -> Result<Self> {
        let d2 = space.dim() * space.dim();
        if matrix.nrows() != d2 || matrix.ncols() != d2 {
            return Err(QdynError::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: d2,
            });
        }
        let blocks = find_blocks(&matrix);
        Ok(Self {
            space,
            matrix,
            blocks,
        })
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Invariant index sets of vec(ρ), each sorted ascending.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Restriction of the generator to one invariant block.
    pub fn block_matrix(&self, block: &[usize]) -> CMat {
        CMat::from_fn(block.len(), block.len(), |i, j| {
            self.matrix[(block[i], block[j])]
        })
    }

    /// `M vec(ρ)` reshaped back to a matrix; the result is a branch state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if *rho.space() != self.space {
            return Err(QdynError::SpaceMismatch);
        }
        let v = &self.matrix * to_vec(rho.matrix());
        DensityMatrix::branch(self.space.clone(), from_vec(&v, self.space.dim()))
    }

    /// `max |vec(I)ᵀ M|`, zero for a trace-preserving generator.
    pub fn trace_residual(&self) -> f64 {
        let d = self.space.dim();
        let mut worst = 0.0f64;
        for col in 0..d * d {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..d {
                acc += self.matrix[(k * d + k, col)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }
}

pub(crate) fn to_vec(m: &CMat) -> CVec {
    CVec::from_column_slice(m.as_slice())
}

pub(crate) fn from_vec(v: &CVec, d: usize) -> CMat {
    CMat::from_column_slice(d, d, v.as_slice())
}

/// Lindblad generator for Hamiltonian `h` and jump operators `jumps`.
///
/// Rates are carried inside the jumps (`F = √Γ L`). Jumps that are exactly
/// zero contribute nothing.
pub fn liouvillian(h: &Operator, jumps: &[Operator]) -> Result<Superoperator> {
    for f in jumps {
        h.check_space(f)?;
    }
    h.check_hermitian()?;
    let space = h.space().clone();
    let d = space.dim();
    let id = CMat::identity(d, d);
    let mut m = CMat::zeros(d * d, d * d);
    let mi = C64::new(0.0, -1.0);
    let hm = h.matrix();
    add_kron(&mut m, &id, hm, mi);
    add_kron(&mut m, &hm.transpose(), &id, -mi);
    let half = C64::new(-0.5, 0.0);
    for f in jumps {
        let fm = f.matrix();
        if fm.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            continue;
        }
        let fdf = fm.adjoint() * fm;
        add_kron(&mut m, &fm.conjugate(), fm, C64::new(1.0, 0.0));
        add_kron(&mut m, &id, &fdf, half);
        add_kron(&mut m, &fdf.transpose(), &id, half);
    }
    Superoperator::new(space, m)
}
