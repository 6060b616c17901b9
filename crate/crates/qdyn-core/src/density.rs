use crate::{CMat, HilbertSpace, QdynError, Result, C64};
use nalgebra::SymmetricEigen;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    /// Hermitian, unit trace, positive semidefinite.
    Physical,
    /// Intermediate term of a perturbative expansion; no constraints.
    PerturbativeBranch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: Arc<HilbertSpace>,
    matrix: CMat,
    kind: StateKind,
}

const HERM_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;
const POS_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Wraps a matrix. Physical states are validated.
    pub fn new(space: Arc<HilbertSpace>, matrix: CMat, kind: StateKind) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QdynError::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: d,
            });
        }
        let rho = Self {
            space,
            matrix,
            kind,
        };
        if kind == StateKind::Physical {
            rho.validate_physical(HERM_TOL, TRACE_TOL, POS_TOL)?;
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for a state vector, normalized.
    pub fn pure(space: &Arc<HilbertSpace>, psi: &[C64]) -> Result<Self> {
        let d = space.dim();
        if psi.len() != d {
            return Err(QdynError::Shape {
                rows: psi.len(),
                cols: 1,
                expected: d,
            });
        }
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(QdynError::InvalidState("zero state vector".into()));
        }
        let v = v / C64::new(norm, 0.0);
        Self::new(space.clone(), &v * v.adjoint(), StateKind::Physical)
    }

    /// Projector onto a product-basis state.
    pub fn basis(space: &Arc<HilbertSpace>, index: usize) -> Result<Self> {
        let d = space.dim();
        if index >= d {
            return Err(QdynError::IndexOutOfRange { index, len: d });
        }
        let mut m = CMat::zeros(d, d);
        m[(index, index)] = C64::new(1.0, 0.0);
        Self::new(space.clone(), m, StateKind::Physical)
    }

    pub fn space(&self) -> &Arc<HilbertSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn kind(&self) -> StateKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// `Tr(ρ ρ†)`, equal to the purity for Hermitian ρ.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for j in 0..d {
            for i in 0..j + 1 {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Checks the Physical invariants at the given tolerances.
    pub fn validate_physical(&self, herm: f64, trace: f64, pos: f64) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > herm {
            return Err(QdynError::InvalidState(format!(
                "not Hermitian (deviation {dev:e})"
            )));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > trace {
            return Err(QdynError::InvalidState(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues()[0];
        if min < -pos {
            return Err(QdynError::InvalidState(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub(crate) fn with_matrix(&self, matrix: CMat) -> Self {
        Self {
            space: self.space.clone(),
            matrix,
            kind: self.kind,
        }
    }

    /// Reinterprets the state as a perturbative branch (no constraints).
    pub fn into_branch(self) -> Self {
        Self {
            kind: StateKind::PerturbativeBranch,
            ..self
        }
    }

    /// Builds a branch state directly, skipping validation.
    pub fn branch(space: Arc<HilbertSpace>, matrix: CMat) -> Result<Self> {
        Self::new(space, matrix, StateKind::PerturbativeBranch)
    }
}
