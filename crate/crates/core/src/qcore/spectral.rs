use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{LinearOperator, StateVector};

/// Spectral decomposition `H = V diag(values) V^dagger` of a hermitian operator.
///
/// Eigenvectors are the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// Decomposes a hermitian operator.
    pub fn of(op: &LinearOperator) -> Result<Self> {
        op.require_hermitian()?;
        // Symmetrize so the solver sees an exactly hermitian input.
        let m = op.entries();
        let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = sym.try_symmetric_eigen(f64::EPSILON, 0).ok_or(Error::Eigen)?;
        Ok(Self { values: eig.eigenvalues.iter().copied().collect(), vectors: eig.eigenvectors })
    }

    /// Assembles a decomposition from known eigenpairs.
    ///
    /// The caller guarantees `vectors` is unitary; this is how pointer models
    /// supply their analytic spectra.
    pub fn from_parts(values: Vec<f64>, vectors: DMatrix<Complex64>) -> Result<Self> {
        if vectors.nrows() != vectors.ncols() {
            return Err(Error::NotSquare(vectors.nrows(), vectors.ncols()));
        }
        if values.len() != vectors.ncols() {
            return Err(Error::DimensionMismatch { expected: vectors.ncols(), got: values.len() });
        }
        Ok(Self { values, vectors })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    /// `f(H) = V diag(f(values)) V^dagger`.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> LinearOperator {
        let mut scaled = self.vectors.clone();
        for (j, &v) in self.values.iter().enumerate() {
            let factor = f(v);
            {
                let mut col = scaled.column_mut(j);
                col *= factor;
            }
        }
        LinearOperator::new(scaled * self.vectors.adjoint()).expect("finite spectral map")
    }

    /// `exp(-i t H)`.
    pub fn evolution(&self, t: f64) -> LinearOperator {
        self.map(|v| Complex64::from_polar(1.0, -t * v))
    }

    /// `exp(-i t H)|psi>` without forming the dense evolution operator.
    pub fn evolve(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: psi.dim() });
        }
        let mut coefficients = self.vectors.adjoint() * DVector::from_column_slice(psi.amps());
        for (c, &v) in coefficients.iter_mut().zip(&self.values) {
            *c *= Complex64::from_polar(1.0, -t * v);
        }
        StateVector::from_dvector(&self.vectors * coefficients)
    }

    pub fn reconstruct(&self) -> LinearOperator {
        self.map(|v| Complex64::new(v, 0.0))
    }
}
