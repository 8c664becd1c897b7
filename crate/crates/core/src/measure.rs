//! Finite atomic measures with complex weights.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::TOL;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub support: f64,
    pub weight: Complex64,
}

/// A finite sum of weighted Dirac masses, sorted by support.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
    total_variation: f64,
}

impl AtomicMeasure {
    pub fn new(mut atoms: Vec<Atom>) -> Result<Self> {
        atoms.sort_by(|a, b| a.support.total_cmp(&b.support));
        for w in atoms.windows(2) {
            if w[1].support - w[0].support <= TOL {
                return Err(Error::DuplicateSupport(w[1].support));
            }
        }
        Ok(Self::from_sorted(atoms))
    }

    fn from_sorted(atoms: Vec<Atom>) -> Self {
        let total_variation = atoms.iter().map(|a| a.weight.norm()).sum();
        AtomicMeasure { atoms, total_variation }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, Complex64)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(support, weight)| Atom { support, weight }).collect())
    }

    pub fn zero() -> Self {
        AtomicMeasure { atoms: Vec::new(), total_variation: 0.0 }
    }

    pub fn dirac(x: f64) -> Self {
        Self::from_sorted(alloc::vec![Atom { support: x, weight: Complex64::new(1.0, 0.0) }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_variation(&self) -> f64 {
        self.total_variation
    }

    /// No atom carries a nonzero weight.
    pub fn is_zero(&self) -> bool {
        self.total_variation == 0.0
    }

    pub fn max_abs_support(&self) -> f64 {
        self.atoms.iter().map(|a| a.support.abs()).fold(0.0, f64::max)
    }

    pub fn weight_at(&self, x: f64) -> Option<Complex64> {
        let i = self.atoms.partition_point(|a| a.support < x - TOL);
        self.atoms.get(i).filter(|a| (a.support - x).abs() <= TOL).map(|a| a.weight)
    }

    /// Multiply the weight at `lambda` by `e^{i s lambda}`; the transform shifts to `x + s`.
    pub fn modulate(&self, s: f64) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { support: a.support, weight: a.weight * Complex64::from_polar(1.0, s * a.support) })
            .collect();
        AtomicMeasure { atoms, total_variation: self.total_variation }
    }

    /// Shift supports by `-x`.
    pub fn translate(&self, x: f64) -> Self {
        let atoms = self.atoms.iter().map(|a| Atom { support: a.support - x, weight: a.weight }).collect();
        AtomicMeasure { atoms, total_variation: self.total_variation }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_sorted(self.atoms.iter().map(|a| Atom { support: a.support, weight: a.weight * c }).collect())
    }

    /// Atomwise sum; supports within `TOL` merge.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.atoms.len() || j < other.atoms.len() {
            match (self.atoms.get(i), other.atoms.get(j)) {
                (Some(a), Some(b)) if (a.support - b.support).abs() <= TOL => {
                    out.push(Atom { support: a.support, weight: a.weight + b.weight });
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a.support < b.support => {
                    out.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) | (None, Some(b)) => {
                    out.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    out.push(*a);
                    i += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Self::from_sorted(out)
    }

    /// Keep atoms satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Atom) -> bool) -> Self {
        Self::from_sorted(self.atoms.iter().copied().filter(|a| keep(a)).collect())
    }

    pub fn map_weights(&self, mut f: impl FnMut(&Atom) -> Complex64) -> Self {
        Self::from_sorted(self.atoms.iter().map(|a| Atom { support: a.support, weight: f(a) }).collect())
    }

    /// `sum_lambda c_lambda e^{i x lambda}`, compensated.
    pub fn fourier(&self, x: f64) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for a in &self.atoms {
            acc.add(a.weight * Complex64::from_polar(1.0, x * a.support));
        }
        acc.value()
    }

    /// `sum_lambda c_lambda / (z - lambda)` for `z` off the real axis.
    pub fn cauchy_transform(&self, z: Complex64) -> Result<Complex64> {
        if z.im == 0.0 {
            return Err(Error::RealPoint(z.re));
        }
        Ok(self.cauchy_unchecked(z))
    }

    pub(crate) fn cauchy_unchecked(&self, z: Complex64) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for a in &self.atoms {
            acc.add(a.weight / (z - a.support));
        }
        acc.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fourier_examples() {
        let d0 = AtomicMeasure::dirac(0.0);
        assert_eq!(d0.fourier(3.7), c(1.0, 0.0));
        let m = AtomicMeasure::from_pairs(vec![(1.0, c(1.0, 0.0)), (-1.0, c(-1.0, 0.0))]).unwrap();
        for x in [-2.0, 0.3, 1.9] {
            assert!((m.fourier(x) - c(0.0, 2.0 * libm::sin(x))).norm() < 1e-15);
        }
        assert_eq!(AtomicMeasure::zero().fourier(1.0), c(0.0, 0.0));
    }

    #[test]
    fn cauchy_examples() {
        let d0 = AtomicMeasure::dirac(0.0);
        assert!((d0.cauchy_transform(c(0.0, 1.0)).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        let d1 = AtomicMeasure::dirac(1.0);
        let y = 3.0;
        let want = c(1.0, 0.0) / c(-1.0, y);
        assert!((d1.cauchy_transform(c(0.0, y)).unwrap() - want).norm() < 1e-15);
        assert_eq!(d0.cauchy_transform(c(2.0, 0.0)), Err(Error::RealPoint(2.0)));
    }

    #[test]
    fn modulate_examples() {
        let m = AtomicMeasure::from_pairs(vec![(0.5, c(1.0, 2.0)), (2.0, c(-0.3, 0.1)), (-4.0, c(0.7, 0.0))]).unwrap();
        assert_eq!(m.modulate(0.0), m);
        assert_eq!(AtomicMeasure::dirac(0.0).modulate(5.0), AtomicMeasure::dirac(0.0));
        let s = 1.3;
        let mm = m.modulate(s);
        assert_eq!(mm.total_variation(), m.total_variation());
        for x in [-3.0, -0.1, 0.0, 2.2] {
            assert!((mm.fourier(x) - m.fourier(x + s)).norm() < 1e-12);
        }
    }

    #[test]
    fn add_merges_supports() {
        let a = AtomicMeasure::from_pairs(vec![(0.0, c(1.0, 0.0)), (1.0, c(1.0, 0.0))]).unwrap();
        let b = AtomicMeasure::from_pairs(vec![(1.0, c(-1.0, 0.0)), (2.0, c(1.0, 0.0))]).unwrap();
        let s = a.add(&b);
        assert_eq!(s.len(), 3);
        assert_eq!(s.weight_at(1.0), Some(c(0.0, 0.0)));
        assert!((s.total_variation() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn duplicate_support_rejected() {
        assert!(AtomicMeasure::from_pairs(vec![(1.0, c(1.0, 0.0)), (1.0, c(2.0, 0.0))]).is_err());
    }
}
