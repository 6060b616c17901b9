use crate::{CMat, DensityMatrix, Factor, HilbertSpace, QdynError, Result, C64};
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

/// Single-factor operator kinds that can be embedded in a composite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorOp {
    Lower,
    Raise,
    Number,
    SigmaMinus,
    SigmaPlus,
    Identity,
}

/// Dense operator bound to a Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    space: Arc<HilbertSpace>,
    matrix: CMat,
}

fn local_matrix(factor: Factor, kind: FactorOp, index: usize) -> Result<CMat> {
    let d = factor.dim();
    let mismatch = || QdynError::KindMismatch {
        kind: format!("{kind:?}"),
        index,
        factor: factor.to_string(),
    };
    let mut m = CMat::zeros(d, d);
    match (factor, kind) {
        (_, FactorOp::Identity) => m.fill_with_identity(),
        (Factor::Boson(_), FactorOp::Lower) => {
            for n in 1..d {
                m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
            }
        }
        (Factor::Boson(_), FactorOp::Raise) => {
            for n in 1..d {
                m[(n, n - 1)] = C64::new((n as f64).sqrt(), 0.0);
            }
        }
        (Factor::Boson(_), FactorOp::Number) => {
            for n in 0..d {
                m[(n, n)] = C64::new(n as f64, 0.0);
            }
        }
        (Factor::TwoLevel, FactorOp::SigmaMinus) => m[(0, 1)] = C64::new(1.0, 0.0),
        (Factor::TwoLevel, FactorOp::SigmaPlus) => m[(1, 0)] = C64::new(1.0, 0.0),
        _ => return Err(mismatch()),
    }
    Ok(m)
}

impl Operator {
    /// Wraps a matrix; fails unless it is `dim x dim`.
    pub fn new(space: Arc<HilbertSpace>, matrix: CMat) -> Result<Self> {
        let d = space.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(QdynError::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected: d,
            });
        }
        Ok(Self { space, matrix })
    }

    /// Like [`Operator::new`] but also verifies Hermiticity.
    pub fn hermitian(space: Arc<HilbertSpace>, matrix: CMat) -> Result<Self> {
        let op = Self::new(space, matrix)?;
        op.check_hermitian()?;
        Ok(op)
    }

    pub fn zeros(space: &Arc<HilbertSpace>) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: CMat::zeros(d, d),
        }
    }

    pub fn identity(space: &Arc<HilbertSpace>) -> Self {
        let d = space.dim();
        Self {
            space: space.clone(),
            matrix: CMat::identity(d, d),
        }
    }

    /// Embeds a single-factor operator with identities on every other factor.
    pub fn factor(space: &Arc<HilbertSpace>, index: usize, kind: FactorOp) -> Result<Self> {
        let factors = space.factors();
        if index >= factors.len() {
            return Err(QdynError::IndexOutOfRange {
                index,
                len: factors.len(),
            });
        }
        let mut m = CMat::identity(1, 1);
        for (k, f) in factors.iter().enumerate() {
            let local = if k == index {
                local_matrix(*f, kind, index)?
            } else {
                CMat::identity(f.dim(), f.dim())
            };
            m = m.kronecker(&local);
        }
        Ok(Self {
            space: space.clone(),
            matrix: m,
        })
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

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn same_space(&self, other: &HilbertSpace) -> bool {
        *self.space == *other
    }

    pub fn dagger(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * C64::new(s, 0.0),
        }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * s,
        }
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.check_space(other)?;
        Ok(Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        })
    }

    /// Largest entry-wise modulus of `M - M†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for j in 0..d {
            for i in 0..d {
                dev = dev.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0f64, |m, z| m.max(z.norm()))
    }

    /// Hermiticity to `1e-12` relative to the largest entry.
    pub fn check_hermitian(&self) -> Result<()> {
        let dev = self.hermitian_deviation();
        if dev > 1e-12 * self.max_abs() {
            return Err(QdynError::NotHermitian(dev));
        }
        Ok(())
    }

    pub(crate) fn check_space(&self, other: &Operator) -> Result<()> {
        if *self.space != *other.space {
            return Err(QdynError::SpaceMismatch);
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;
    /// Panics if the operands live on different spaces.
    fn add(self, rhs: &Operator) -> Operator {
        assert!(*self.space == *rhs.space, "space mismatch in operator sum");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        assert!(*self.space == *rhs.space, "space mismatch in operator difference");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        assert!(*self.space == *rhs.space, "space mismatch in operator product");
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// `Tr(O ρ)`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    if !op.same_space(rho.space()) {
        return Err(QdynError::SpaceMismatch);
    }
    Ok(trace_product(op.matrix(), rho.matrix()))
}

pub(crate) fn trace_product(a: &CMat, b: &CMat) -> C64 {
    let d = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::StateKind;
    use nalgebra::SymmetricEigen;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn space(f: &[Factor]) -> Arc<HilbertSpace> {
        Arc::new(HilbertSpace::new(f).unwrap())
    }

    #[test]
    fn boson_lowering_entries() {
        let s = space(&[Factor::Boson(2)]);
        let a = Operator::factor(&s, 0, FactorOp::Lower).unwrap();
        let m = a.matrix();
        assert_eq!(m[(0, 1)], c(1.0));
        assert!((m[(1, 2)].re - 2f64.sqrt()).abs() < 1e-15);
        let nonzero = m.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn sigma_minus() {
        let s = space(&[Factor::TwoLevel]);
        let sm = Operator::factor(&s, 0, FactorOp::SigmaMinus).unwrap();
        let expected = CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!(sm.matrix(), &expected);
    }

    #[test]
    fn embedded_number_operator() {
        let s = space(&[Factor::Boson(1), Factor::TwoLevel]);
        let a = Operator::factor(&s, 0, FactorOp::Lower).unwrap();
        // a ⊗ I₂ written out by hand: basis |n,s⟩ with index 2n + s
        let mut hand = CMat::zeros(4, 4);
        hand[(0, 2)] = c(1.0);
        hand[(1, 3)] = c(1.0);
        assert_eq!(a.matrix(), &hand);
        let n = &a.dagger() * &a;
        let re = n.matrix().map(|z| z.re);
        let mut ev: Vec<f64> = SymmetricEigen::new(re).eigenvalues.iter().copied().collect();
        ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (got, want) in ev.iter().zip([0.0, 0.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn kind_and_index_errors() {
        let s = space(&[Factor::Boson(1), Factor::TwoLevel]);
        assert!(matches!(
            Operator::factor(&s, 0, FactorOp::SigmaMinus),
            Err(QdynError::KindMismatch { .. })
        ));
        assert!(matches!(
            Operator::factor(&s, 1, FactorOp::Lower),
            Err(QdynError::KindMismatch { .. })
        ));
        assert!(matches!(
            Operator::factor(&s, 2, FactorOp::Identity),
            Err(QdynError::IndexOutOfRange { index: 2, len: 2 })
        ));
    }

    #[test]
    fn disjoint_factors_commute() {
        let s = space(&[Factor::Boson(2), Factor::Boson(2), Factor::TwoLevel]);
        let a0 = Operator::factor(&s, 0, FactorOp::Lower).unwrap();
        let a1 = Operator::factor(&s, 1, FactorOp::Raise).unwrap();
        let sp = Operator::factor(&s, 2, FactorOp::SigmaPlus).unwrap();
        assert_eq!(a0.commutator(&a1).unwrap().max_abs(), 0.0);
        assert_eq!(a0.commutator(&sp).unwrap().max_abs(), 0.0);
        assert_eq!(a1.commutator(&sp).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn hermitian_check() {
        let s = space(&[Factor::Boson(2)]);
        let a = Operator::factor(&s, 0, FactorOp::Lower).unwrap();
        let x = &a + &a.dagger();
        assert!(x.check_hermitian().is_ok());
        assert!(matches!(a.check_hermitian(), Err(QdynError::NotHermitian(_))));
        assert!(Operator::hermitian(s.clone(), a.matrix().clone()).is_err());
    }

    #[test]
    fn shape_checked() {
        let s = space(&[Factor::TwoLevel]);
        assert!(matches!(
            Operator::new(s, CMat::zeros(3, 3)),
            Err(QdynError::Shape { .. })
        ));
    }

    #[test]
    fn expectation_examples() {
        let s = space(&[Factor::TwoLevel]);
        let id = Operator::identity(&s);
        let rho = DensityMatrix::pure(&s, &[c(0.6), C64::new(0.0, 0.8)]).unwrap();
        assert!((expectation(&id, &rho).unwrap() - c(1.0)).norm() < 1e-12);

        let sz = Operator::new(
            s.clone(),
            CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)])),
        )
        .unwrap();
        let ground = DensityMatrix::pure(&s, &[c(1.0), c(0.0)]).unwrap();
        assert_eq!(expectation(&sz, &ground).unwrap(), c(1.0));

        let b = space(&[Factor::Boson(2)]);
        let a = Operator::factor(&b, 0, FactorOp::Lower).unwrap();
        let x = &a + &a.dagger();
        let mut m = CMat::zeros(3, 3);
        m[(1, 0)] = c(1.0);
        let rho10 = DensityMatrix::new(b.clone(), m, StateKind::PerturbativeBranch).unwrap();
        assert_eq!(expectation(&x, &rho10).unwrap(), c(1.0));

        assert_eq!(
            expectation(&x, &ground),
            Err(QdynError::SpaceMismatch)
        );
    }
}
