//! Dense complex linear algebra for small Hilbert spaces.
//!
//! States and operators are thin wrappers over `nalgebra` storage. Joint
//! system (x) pointer states use the system-major index convention, and the
//! coupling unitary is built from the product of the two factor spectra.

mod joint;
mod operator;
mod spectral;
mod state;

pub use joint::{coupling_unitary, first_order_state, tensor_product, Coupling, JointState};
pub use operator::LinearOperator;
pub use spectral::HermitianEigen;
pub use state::{inner, StateVector};
