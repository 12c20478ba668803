use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
///
/// Scenario parsing has its own diagnostic type (see [`crate::scenario::Diagnostic`]);
/// this enum covers everything past the text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("operator is not hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("pre- and post-selection are nearly orthogonal (|<out|in>| = {0:e})")]
    NearOrthogonal(f64),

    #[error("orthogonal post-selection at g = {g} (probability {probability:e})")]
    OrthogonalPostSelection { g: f64, probability: f64 },

    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),

    #[error("invalid pointer model: {0}")]
    InvalidPointer(String),

    #[error("invalid g schedule: {0}")]
    InvalidSchedule(String),

    #[error("not enough usable points for a fit: {usable} (need at least {needed})")]
    InsufficientPoints { usable: usize, needed: usize },

    #[error("fitted order {0} falls outside every classification band")]
    Unclassified(f64),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("unknown arm `{0}`")]
    UnknownArm(String),

    #[error("slice index {index} out of range ({count} slices)")]
    InvalidSlice { index: usize, count: usize },

    #[error("post-selection detector `{0}` is dark")]
    DarkDetector(String),

    #[error("eigendecomposition failed to converge")]
    Eigen,
}

pub type Result<T> = std::result::Result<T, Error>;
