use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::STRUCTURAL;

/// A complex amplitude vector for a system, a pointer, or the joint space.
///
/// The `normalized` tag is set only by constructors that check it; conditional
/// (post-selected) branches are carried untagged.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
    normalized: bool,
}

impl StateVector {
    /// Wraps amplitudes without any normalization requirement.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::from_dvector(DVector::from_vec(amps))
    }

    pub(crate) fn from_dvector(amps: DVector<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(i) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { amps, normalized: false })
    }

    /// Wraps amplitudes that must already have unit norm.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let mut state = Self::new(amps)?;
        let norm = state.norm();
        if (norm * norm - 1.0).abs() > STRUCTURAL {
            return Err(Error::NotNormalized(norm));
        }
        state.normalized = true;
        Ok(state)
    }

    /// Real amplitudes, normalized on the way in.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())?.into_normalized()
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch { expected: dim, got: index + 1 });
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, normalized: true })
    }

    /// Sets the normalization tag when the norm is already within tolerance.
    pub(crate) fn tagged(mut self, normalized: bool) -> Self {
        self.normalized = normalized && (self.norm_sqr() - 1.0).abs() <= STRUCTURAL;
        self
    }

    /// Rescales to unit norm and sets the tag.
    pub fn into_normalized(self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self { amps: self.amps.unscale(norm), normalized: true })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        self.amps.as_slice()
    }

    pub(crate) fn as_dvector(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other)?;
        Ok(self.amps.dotc(&other.amps))
    }

    pub fn scaled(&self, factor: Complex64) -> StateVector {
        let normalized = self.normalized && (factor.norm() - 1.0).abs() <= STRUCTURAL;
        Self { amps: &self.amps * factor, normalized }
    }

    pub fn add(&self, other: &StateVector) -> Result<StateVector> {
        self.check_dim(other)?;
        Ok(Self { amps: &self.amps + &other.amps, normalized: false })
    }

    pub fn sub(&self, other: &StateVector) -> Result<StateVector> {
        self.check_dim(other)?;
        Ok(Self { amps: &self.amps - &other.amps, normalized: false })
    }

    /// Euclidean distance `||self - other||`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok((&self.amps - &other.amps).norm())
    }

    fn check_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        Ok(())
    }
}

/// `<a|b>`.
pub fn inner(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    a.inner(b)
}
