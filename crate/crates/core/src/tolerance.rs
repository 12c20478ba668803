//! Tolerance constants shared by every module.
//!
//! Structural checks (normalization, hermiticity tags) use [`STRUCTURAL`];
//! anything built through an eigendecomposition is held to [`UNITARITY`].
//! Fit assertions carry their own per-case tolerances at the call site.

/// Normalization and hermiticity tags.
pub const STRUCTURAL: f64 = 1e-12;

/// Max-entry deviation of `U^dagger U` from the identity.
pub const UNITARITY: f64 = 1e-10;

/// Smallest `|<out|in>|` accepted by the analytic weak-value formula.
pub const OVERLAP_THRESHOLD: f64 = 1e-12;

/// Post-selection probabilities below this are treated as a dark detector.
pub const DARK_PROBABILITY: f64 = 1e-300;

/// Metric values at or below this are "identically zero" and excluded from fits.
pub const METRIC_FLOOR: f64 = 1e-14;

/// Allowed imaginary residue of an expectation value of a hermitian operator.
pub const REAL_RESIDUE: f64 = 1e-10;

/// Auto-normalization limit for scenario states; larger deviations are errors.
pub const AUTO_NORMALIZE: f64 = 1e-6;
