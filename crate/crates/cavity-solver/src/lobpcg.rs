use crate::{CavityError, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LobpcgOptions {
    /// Relative residual `‖Kx − λx‖ / λ` required for the wanted pairs.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LobpcgOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eigenpairs {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns (Euclidean inner product).
    pub vectors: DMatrix<f64>,
    pub iterations: usize,
    pub max_residual: f64,
}

/// Orthonormalizes the columns of `v` against themselves, dropping
/// directions whose Gram eigenvalue falls below `drop_tol` times the largest.
fn svqb(v: &DMatrix<f64>, drop_tol: f64) -> DMatrix<f64> {
    let gram = v.tr_mul(v);
    let eig = SymmetricEigen::new(gram);
    let top = eig.eigenvalues.amax();
    let keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > drop_tol * top)
        .collect();
    let mut t = DMatrix::zeros(v.ncols(), keep.len());
    for (c, &i) in keep.iter().enumerate() {
        let s = 1.0 / eig.eigenvalues[i].sqrt();
        t.set_column(c, &(eig.eigenvectors.column(i) * s));
    }
    v * t
}

fn orthonormalize(v: &DMatrix<f64>) -> DMatrix<f64> {
    // two passes recover orthogonality lost to rounding in the first
    let q = svqb(v, 1e-14);
    svqb(&q, 1e-14)
}

/// Sorted Rayleigh–Ritz on an orthonormal basis `q` with `kq = K q`.
fn rayleigh_ritz(q: &DMatrix<f64>, kq: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let mut g = q.tr_mul(kq);
    let gt = g.transpose();
    g += gt;
    g *= 0.5;
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(eig.eigenvectors.nrows(), order.len());
    for (c, &i) in order.iter().enumerate() {
        vecs.set_column(c, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// Locally optimal block preconditioned conjugate gradient for the lowest
/// `wanted` eigenpairs of a symmetric positive definite operator.
///
/// `x0` supplies the starting block; columns beyond `wanted` act as guard
/// vectors that speed up convergence at the edge of the wanted cluster.
pub fn lobpcg<A, T>(
    apply: A,
    precondition: T,
    x0: DMatrix<f64>,
    wanted: usize,
    opts: LobpcgOptions,
) -> Result<Eigenpairs>
where
    A: Fn(&DMatrix<f64>) -> DMatrix<f64>,
    T: Fn(&DMatrix<f64>) -> DMatrix<f64>,
{
    let m = x0.ncols();
    if wanted == 0 || wanted > m || m > x0.nrows() {
        return Err(CavityError::InvalidArgument {
            key: "wanted",
            reason: format!("need 0 < wanted ({wanted}) <= block ({m}) <= size ({})", x0.nrows()),
        });
    }
    let mut x = orthonormalize(&x0);
    if x.ncols() < m {
        return Err(CavityError::InvalidArgument {
            key: "x0",
            reason: "starting block is rank deficient".into(),
        });
    }
    let kx0 = apply(&x);
    let (theta, c) = rayleigh_ritz(&x, &kx0);
    x = &x * &c;
    let mut kx = kx0 * &c;
    let mut theta: Vec<f64> = theta.iter().copied().collect();
    let mut p: Option<DMatrix<f64>> = None;
    let mut worst = f64::INFINITY;

    for it in 0..opts.max_iter {
        let mut r = kx.clone();
        for j in 0..m {
            let mut col = r.column_mut(j);
            col.axpy(-theta[j], &x.column(j), 1.0);
        }
        let rel: Vec<f64> = (0..m).map(|j| r.column(j).norm() / theta[j].abs().max(f64::MIN_POSITIVE)).collect();
        worst = rel[..wanted].iter().copied().fold(0.0, f64::max);
        if worst <= opts.tol {
            return Ok(Eigenpairs {
                values: theta[..wanted].to_vec(),
                vectors: x.columns(0, wanted).into_owned(),
                iterations: it,
                max_residual: worst,
            });
        }
        // only unconverged directions get new search vectors
        let active: Vec<usize> = (0..m).filter(|&j| rel[j] > opts.tol * 0.1).collect();
        let r_act = r.select_columns(active.iter());
        let mut w = precondition(&r_act);
        // project out the current Ritz block
        let xtw = x.tr_mul(&w);
        w -= &x * xtw;
        let mut extra = w;
        if let Some(pp) = &p {
            let xtp = x.tr_mul(pp);
            let pp = pp - &x * xtp;
            let cols = extra.ncols() + pp.ncols();
            let mut joined = DMatrix::zeros(extra.nrows(), cols);
            joined.columns_mut(0, extra.ncols()).copy_from(&extra);
            joined.columns_mut(extra.ncols(), pp.ncols()).copy_from(&pp);
            extra = joined;
        }
        let mut s = orthonormalize(&extra);
        // re-project after normalization to keep [x, s] orthonormal
        let xts = x.tr_mul(&s);
        s -= &x * xts;
        s = orthonormalize(&s);
        let ns = s.ncols();
        if ns == 0 {
            break;
        }
        let ks = apply(&s);
        let nx = m;
        let mut q = DMatrix::zeros(x.nrows(), nx + ns);
        q.columns_mut(0, nx).copy_from(&x);
        q.columns_mut(nx, ns).copy_from(&s);
        let mut kq = DMatrix::zeros(x.nrows(), nx + ns);
        kq.columns_mut(0, nx).copy_from(&kx);
        kq.columns_mut(nx, ns).copy_from(&ks);
        let (vals, c) = rayleigh_ritz(&q, &kq);
        let c = c.columns(0, m).into_owned();
        let cx = c.rows(0, nx).into_owned();
        let cs = c.rows(nx, ns).into_owned();
        let new_p = &s * &cs;
        let new_kp = &ks * &cs;
        x = &x * &cx + &new_p;
        kx = &kx * &cx + &new_kp;
        theta = vals.iter().take(m).copied().collect();
        p = Some(new_p);
        if theta.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    Err(CavityError::NotConverged {
        iterations: opts.max_iter,
        residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator() {
        let n = 200;
        let d: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.37 + ((i * 31) % 7) as f64).collect();
        let apply = |x: &DMatrix<f64>| {
            let mut y = x.clone();
            for i in 0..n {
                y.row_mut(i).scale_mut(d[i]);
            }
            y
        };
        let x0 = DMatrix::from_fn(n, 8, |i, j| ((i * (j + 3)) % 11) as f64 - 5.0 + (i == j) as u8 as f64);
        let got = lobpcg(apply, |r: &DMatrix<f64>| r.clone(), x0, 5, LobpcgOptions { tol: 1e-10, max_iter: 500 }).unwrap();
        let mut sorted = d.clone();
        sorted.sort_by(f64::total_cmp);
        for k in 0..5 {
            assert!((got.values[k] - sorted[k]).abs() < 1e-9 * sorted[k], "{k}: {} vs {}", got.values[k], sorted[k]);
        }
        let gram = got.vectors.tr_mul(&got.vectors);
        assert!((gram - DMatrix::identity(5, 5)).amax() < 1e-10);
    }
}
