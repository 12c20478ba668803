use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{HermitianEigen, LinearOperator, StateVector};

/// A state on system (x) pointer.
///
/// Index convention is system-major: amplitude `(i, j)` lives at `i * ptr_dim + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    sys_dim: usize,
    ptr_dim: usize,
    state: StateVector,
}

impl JointState {
    pub fn new(sys_dim: usize, ptr_dim: usize, state: StateVector) -> Result<Self> {
        if state.dim() != sys_dim * ptr_dim {
            return Err(Error::DimensionMismatch { expected: sys_dim * ptr_dim, got: state.dim() });
        }
        Ok(Self { sys_dim, ptr_dim, state })
    }

    pub fn sys_dim(&self) -> usize {
        self.sys_dim
    }

    pub fn ptr_dim(&self) -> usize {
        self.ptr_dim
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn amplitude(&self, sys: usize, ptr: usize) -> Complex64 {
        self.state.amps()[sys * self.ptr_dim + ptr]
    }

    /// Amplitudes as a `sys_dim x ptr_dim` matrix.
    pub(crate) fn to_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.sys_dim, self.ptr_dim, self.state.amps())
    }

    pub(crate) fn from_matrix(m: &DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        let amps: Vec<Complex64> = m.transpose().iter().copied().collect();
        Self::new(rows, cols, StateVector::new(amps)?)
    }

    /// `(<out| (x) I) |self>`: the unnormalized pointer branch for outcome `out`.
    pub fn project_system(&self, out: &StateVector) -> Result<StateVector> {
        if out.dim() != self.sys_dim {
            return Err(Error::DimensionMismatch { expected: self.sys_dim, got: out.dim() });
        }
        let row = out.as_dvector().adjoint() * self.to_matrix();
        StateVector::from_dvector(row.transpose())
    }

    /// `(A (x) I) |self>`.
    pub fn apply_system(&self, op: &LinearOperator) -> Result<Self> {
        op.check_dim(self.sys_dim)?;
        Self::from_matrix(&(op.entries() * self.to_matrix()))
    }

    /// `(I (x) B) |self>`.
    pub fn apply_pointer(&self, op: &LinearOperator) -> Result<Self> {
        op.check_dim(self.ptr_dim)?;
        Self::from_matrix(&(self.to_matrix() * op.entries().transpose()))
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        if (self.sys_dim, self.ptr_dim) != (other.sys_dim, other.ptr_dim) {
            return Err(Error::DimensionMismatch { expected: self.state.dim(), got: other.state.dim() });
        }
        self.state.distance(&other.state)
    }
}

/// `a (x) b` in the system-major convention.
pub fn tensor_product(a: &StateVector, b: &StateVector) -> JointState {
    let amps: DVector<Complex64> = a.as_dvector().kronecker(b.as_dvector());
    let state = StateVector::from_dvector(amps)
        .expect("product of finite vectors")
        .tagged(a.is_normalized() && b.is_normalized());
    JointState { sys_dim: a.dim(), ptr_dim: b.dim(), state }
}

/// The von Neumann coupling `exp(-i g S (x) P)`, held in factored spectral form.
///
/// The generator `S (x) P` is diagonal in the product eigenbasis `V_S (x) V_P`
/// with eigenvalues `s_a p_b`, so the exponential is exact for every `g` and
/// never needs the joint matrix.
#[derive(Debug, Clone)]
pub struct Coupling {
    system: HermitianEigen,
    pointer: HermitianEigen,
}

impl Coupling {
    pub fn new(system: &LinearOperator, pointer: &LinearOperator) -> Result<Self> {
        Ok(Self { system: HermitianEigen::of(system)?, pointer: HermitianEigen::of(pointer)? })
    }

    pub fn from_spectra(system: HermitianEigen, pointer: HermitianEigen) -> Self {
        Self { system, pointer }
    }

    pub fn sys_dim(&self) -> usize {
        self.system.dim()
    }

    pub fn ptr_dim(&self) -> usize {
        self.pointer.dim()
    }

    pub fn system_spectrum(&self) -> &HermitianEigen {
        &self.system
    }

    pub fn pointer_spectrum(&self) -> &HermitianEigen {
        &self.pointer
    }

    /// `U(g) |psi>`.
    pub fn apply(&self, g: f64, psi: &JointState) -> Result<JointState> {
        if psi.sys_dim != self.sys_dim() || psi.ptr_dim != self.ptr_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.sys_dim() * self.ptr_dim(),
                got: psi.state.dim(),
            });
        }
        if g == 0.0 {
            return Ok(psi.clone());
        }
        let vs = self.system.vectors();
        let vp = self.pointer.vectors();
        let m = psi.to_matrix();
        let mut out = DMatrix::<Complex64>::zeros(psi.sys_dim, psi.ptr_dim);
        for (a, &s) in self.system.values().iter().enumerate() {
            let col = vs.column(a);
            // Pointer branch attached to this system eigenvector.
            let branch = (col.adjoint() * &m).transpose();
            let evolved = if s == 0.0 {
                branch
            } else {
                let mut coeffs = vp.adjoint() * branch;
                for (c, &p) in coeffs.iter_mut().zip(self.pointer.values()) {
                    *c *= Complex64::from_polar(1.0, -g * s * p);
                }
                vp * coeffs
            };
            out += col * evolved.transpose();
        }
        JointState::from_matrix(&out)
    }

    /// The full joint-space matrix of `U(g)`.
    pub fn unitary(&self, g: f64) -> LinearOperator {
        let vs = self.system.vectors();
        let vp = self.pointer.vectors();
        let basis = vs.kronecker(vp);
        let np = self.ptr_dim();
        let mut scaled = basis.clone();
        for (a, &s) in self.system.values().iter().enumerate() {
            for (b, &p) in self.pointer.values().iter().enumerate() {
                let phase = Complex64::from_polar(1.0, -g * s * p);
                {
                    let mut col = scaled.column_mut(a * np + b);
                    col *= phase;
                }
            }
        }
        LinearOperator::new(scaled * basis.adjoint()).expect("finite unitary")
    }
}

/// `exp(-i g S (x) P)` as a dense matrix on the joint space.
pub fn coupling_unitary(s: &LinearOperator, p: &LinearOperator, g: f64) -> Result<LinearOperator> {
    Ok(Coupling::new(s, p)?.unitary(g))
}

/// `|in> (x) |m> - i g S|in> (x) P|m>`, the state to first order in `g`.
pub fn first_order_state(
    input: &StateVector,
    ready: &StateVector,
    s: &LinearOperator,
    p: &LinearOperator,
    g: f64,
) -> Result<JointState> {
    let s_in = s.apply(input)?;
    let p_m = p.apply(ready)?;
    let zeroth = tensor_product(input, ready);
    let first = tensor_product(&s_in, &p_m);
    let amps = zeroth.state.add(&first.state.scaled(Complex64::new(0.0, -g)))?;
    JointState::new(input.dim(), ready.dim(), amps)
}
