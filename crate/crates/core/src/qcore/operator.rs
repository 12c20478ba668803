use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::StateVector;
use crate::tolerance::STRUCTURAL;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Dense complex square matrix. The `hermitian` tag is computed on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    entries: DMatrix<Complex64>,
    hermitian: bool,
}

impl LinearOperator {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare(entries.nrows(), entries.ncols()));
        }
        if entries.nrows() == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(i) = entries.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        let hermitian = hermitian_deviation(&entries) <= STRUCTURAL;
        Ok(Self { entries, hermitian })
    }

    /// Builds from row-major rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare(n, bad.len()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn identity(dim: usize) -> Self {
        Self { entries: DMatrix::identity(dim, dim), hermitian: true }
    }

    pub fn pauli_x() -> Self {
        Self::fixed([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Self::fixed([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self::fixed([[ONE, ZERO], [ZERO, -ONE]])
    }

    fn fixed(m: [[Complex64; 2]; 2]) -> Self {
        Self { entries: DMatrix::from_fn(2, 2, |i, j| m[i][j]), hermitian: true }
    }

    /// `|v><v|` for a (not necessarily normalized) state.
    pub fn projector(v: &StateVector) -> Self {
        let a = v.as_dvector();
        let entries = a * a.adjoint();
        let hermitian = hermitian_deviation(&entries) <= STRUCTURAL;
        Self { entries, hermitian }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Max-entry distance from the conjugate transpose.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.entries)
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), hermitian: self.hermitian }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.check_dim(v.dim())?;
        StateVector::from_dvector(&self.entries * v.as_dvector())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::new(&self.entries + &other.entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::new(&self.entries - &other.entries)
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        Self::new(&self.entries * Complex64::new(factor, 0.0))
    }

    pub fn scale_complex(&self, factor: Complex64) -> Result<Self> {
        Self::new(&self.entries * factor)
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim())?;
        Self::new(&self.entries * &other.entries)
    }

    /// Kronecker product with `self` as the slower (outer) index.
    pub fn kron(&self, other: &Self) -> Self {
        let entries = self.entries.kronecker(&other.entries);
        Self { hermitian: self.hermitian && other.hermitian, entries }
    }

    /// Max-entry distance between `self` and `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_dim(other.dim())?;
        Ok(self.entries.iter().zip(other.entries.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Max-entry deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let product = self.entries.adjoint() * &self.entries;
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((product[(i, j)] - target).norm());
            }
        }
        worst
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: dim });
        }
        Ok(())
    }

    pub(crate) fn require_hermitian(&self) -> Result<()> {
        if !self.hermitian {
            return Err(Error::NotHermitian(self.hermitian_deviation()));
        }
        Ok(())
    }
}

fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paulis_are_hermitian_and_square_to_identity() {
        for p in [LinearOperator::pauli_x(), LinearOperator::pauli_y(), LinearOperator::pauli_z()] {
            assert!(p.is_hermitian());
            let sq = p.matmul(&p).unwrap();
            assert_eq!(sq.max_abs_diff(&LinearOperator::identity(2)).unwrap(), 0.0);
        }
    }

    #[test]
    fn hermitian_tag_tracks_entries() {
        let m = LinearOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(!m.is_hermitian());
        assert!(matches!(m.require_hermitian(), Err(Error::NotHermitian(d)) if d == 1.0));
    }

    #[test]
    fn rejects_non_square_rows() {
        let rows = vec![vec![ONE, ZERO], vec![ONE]];
        assert!(matches!(LinearOperator::from_rows(&rows), Err(Error::NotSquare(2, 1))));
    }

    #[test]
    fn kron_is_system_major() {
        // (sigma_z (x) 1)|1,0> puts the -1 on the slow index.
        let op = LinearOperator::pauli_z().kron(&LinearOperator::identity(2));
        assert_eq!(op.entry(2, 2), -ONE);
        assert_eq!(op.entry(1, 1), ONE);
    }
}
