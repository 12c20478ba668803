//! Weak values of pre- and post-selected quantum systems.
//!
//! The crate computes weak values analytically and by simulating the full
//! von Neumann pointer coupling, measures how the coupled state behaves as the
//! coupling strength goes to zero, and models single-particle interferometers
//! whose arms carry weak pointers.
//!
//! Units: hbar = 1. The coupling `g` carries units of pointer position per
//! eigenvalue of the measured observable.

pub mod error;
pub mod interferometer;
pub mod limits;
pub mod pointer;
pub mod qcore;
pub mod scenario;
pub mod tolerance;
pub mod weakmeas;

pub use error::{Error, Result};
pub use interferometer::{OpticalNetwork, Presence, PresenceReport};
pub use limits::{OrderFit, SweepResult};
pub use pointer::PointerModel;
pub use qcore::{JointState, LinearOperator, StateVector};
pub use weakmeas::{PrePostSelection, WeakValueEstimate};

pub use num_complex::Complex64;
