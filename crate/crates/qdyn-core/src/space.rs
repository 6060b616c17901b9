use crate::{QdynError, Result};
use std::fmt;

/// One tensor factor of a composite space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    /// Harmonic mode truncated to Fock states `0..=cutoff`.
    Boson(usize),
    /// Two-level system with basis (|g⟩, |e⟩).
    TwoLevel,
}

impl Factor {
    pub fn dim(self) -> usize {
        match self {
            Factor::Boson(c) => c + 1,
            Factor::TwoLevel => 2,
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Boson(c) => write!(f, "Boson({c})"),
            Factor::TwoLevel => write!(f, "TwoLevel"),
        }
    }
}

/// Ordered tensor product of factors. The first factor is the most
/// significant index of the product basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HilbertSpace {
    factors: Vec<Factor>,
    dim: usize,
}

impl HilbertSpace {
    pub fn new(factors: &[Factor]) -> Result<Self> {
        if factors.is_empty() {
            return Err(QdynError::EmptySpace);
        }
        for f in factors {
            if let Factor::Boson(c) = *f {
                if c < 1 {
                    return Err(QdynError::InvalidCutoff(c));
                }
            }
        }
        let dim = factors.iter().map(|f| f.dim()).product();
        Ok(Self {
            factors: factors.to_vec(),
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// Per-factor occupation of a product-basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate().rev() {
            out[k] = index % f.dim();
            index /= f.dim();
        }
        out
    }

    /// Product-basis index of per-factor occupations.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        assert_eq!(digits.len(), self.factors.len());
        self.factors
            .iter()
            .zip(digits)
            .fold(0, |acc, (f, &d)| {
                assert!(d < f.dim(), "occupation {d} exceeds factor {f}");
                acc * f.dim() + d
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims() {
        let s = HilbertSpace::new(&[
            Factor::Boson(2),
            Factor::Boson(2),
            Factor::TwoLevel,
            Factor::TwoLevel,
        ])
        .unwrap();
        assert_eq!(s.dim(), 36);
        assert_eq!(HilbertSpace::new(&[Factor::TwoLevel]).unwrap().dim(), 2);
        let s = HilbertSpace::new(&[
            Factor::Boson(1),
            Factor::Boson(1),
            Factor::TwoLevel,
            Factor::TwoLevel,
        ])
        .unwrap();
        assert_eq!(s.dim(), 16);
    }

    #[test]
    fn rejects_bad_factors() {
        assert_eq!(HilbertSpace::new(&[]), Err(QdynError::EmptySpace));
        assert_eq!(
            HilbertSpace::new(&[Factor::Boson(0)]),
            Err(QdynError::InvalidCutoff(0))
        );
    }

    #[test]
    fn digits_roundtrip() {
        let s = HilbertSpace::new(&[Factor::Boson(3), Factor::TwoLevel, Factor::Boson(1)]).unwrap();
        for i in 0..s.dim() {
            assert_eq!(s.index_of(&s.digits(i)), i);
        }
        assert_eq!(s.digits(1), vec![0, 0, 1]);
        assert_eq!(s.digits(4), vec![1, 0, 0]);
    }
}
