//! Measuring-device models.
//!
//! Two pointers are provided: a Gaussian wavepacket sampled on a periodic
//! position grid, and a single qubit. Each supplies a ready state `|m>`, a
//! translation generator `P` (the operator that couples to the system) and a
//! conjugate readout `Q`, normalized so that `<m|[Q, P]|m> = i`.
//!
//! The grid pointer realizes `P = -i d/dq` spectrally: its eigenvectors are the
//! discrete Fourier modes of the grid, so `exp(-i g P)` translates band-limited
//! wavepackets by exactly `g`. The Nyquist mode is assigned eigenvalue zero,
//! which keeps `P` hermitian and real-antisymmetric.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{HermitianEigen, LinearOperator, StateVector};
use crate::tolerance::REAL_RESIDUE;

/// Default grid size for [`GaussianGrid::with_spread`].
pub const DEFAULT_POINTS: usize = 256;
/// Default half-width in units of the spread.
pub const DEFAULT_HALF_WIDTH_SPREADS: f64 = 16.0;

const MIN_POINTS: usize = 64;
const BOUNDARY_AMPLITUDE: f64 = 1e-12;

/// Gaussian wavepacket `psi(q) ~ exp(-q^2 / (4 spread^2))` on a periodic grid.
///
/// `spread` is the standard deviation of the position distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianGrid {
    n_points: usize,
    half_width: f64,
    spread: f64,
}

impl GaussianGrid {
    pub fn new(spread: f64, half_width: f64, n_points: usize) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidPointer(msg));
        if !(spread.is_finite() && spread > 0.0) {
            return invalid(format!("spread must be positive, got {spread}"));
        }
        if !half_width.is_finite() || half_width < 8.0 * spread {
            return invalid(format!("half width {half_width} is below 8 spreads ({})", 8.0 * spread));
        }
        if n_points < MIN_POINTS || !n_points.is_power_of_two() {
            return invalid(format!("grid size must be a power of two >= {MIN_POINTS}, got {n_points}"));
        }
        let grid = Self { n_points, half_width, spread };
        if grid.spacing() > spread / 4.0 {
            return invalid(format!("grid spacing {} exceeds spread / 4 = {}", grid.spacing(), spread / 4.0));
        }
        let edge = grid.boundary_amplitude();
        if edge >= BOUNDARY_AMPLITUDE {
            return invalid(format!("boundary amplitude {edge:e} is not below {BOUNDARY_AMPLITUDE:e}"));
        }
        Ok(grid)
    }

    /// Default resolution: half-width 16 spreads, 256 points.
    pub fn with_spread(spread: f64) -> Result<Self> {
        Self::new(spread, DEFAULT_HALF_WIDTH_SPREADS * spread, DEFAULT_POINTS)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    /// Cell-centred coordinates, symmetric about zero.
    pub fn coordinates(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points).map(|j| -self.half_width + (j as f64 + 0.5) * h).collect()
    }

    /// Wave numbers of the Fourier modes, Nyquist mode set to zero.
    pub fn wave_numbers(&self) -> Vec<f64> {
        let n = self.n_points as i64;
        (0..n)
            .map(|l| {
                let m = if l < n / 2 { l } else { l - n };
                if m == -n / 2 {
                    0.0
                } else {
                    PI * m as f64 / self.half_width
                }
            })
            .collect()
    }

    /// Discrete amplitude at the outermost grid point of the normalized packet.
    fn boundary_amplitude(&self) -> f64 {
        let q = self.half_width - 0.5 * self.spacing();
        let norm = (2.0 * PI * self.spread * self.spread).powf(-0.25) * self.spacing().sqrt();
        norm * (-q * q / (4.0 * self.spread * self.spread)).exp()
    }

    fn fourier_modes(&self) -> DMatrix<Complex64> {
        let q = self.coordinates();
        let k = self.wave_numbers();
        let n = self.n_points;
        let scale = 1.0 / (n as f64).sqrt();
        // The Nyquist column keeps its plane wave; only its eigenvalue is zeroed.
        let nyquist = -PI * (n / 2) as f64 / self.half_width;
        DMatrix::from_fn(n, n, |j, l| {
            let kl = if l == n / 2 { nyquist } else { k[l] };
            Complex64::from_polar(scale, kl * q[j])
        })
    }
}

/// The Pauli matrix used as a qubit pointer's translation generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub fn operator(self) -> LinearOperator {
        match self {
            PauliAxis::X => LinearOperator::pauli_x(),
            PauliAxis::Y => LinearOperator::pauli_y(),
            PauliAxis::Z => LinearOperator::pauli_z(),
        }
    }

    /// Next axis in cyclic order x -> y -> z -> x.
    fn next(self) -> Self {
        match self {
            PauliAxis::X => PauliAxis::Y,
            PauliAxis::Y => PauliAxis::Z,
            PauliAxis::Z => PauliAxis::X,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PauliAxis::X => "pauli_x",
            PauliAxis::Y => "pauli_y",
            PauliAxis::Z => "pauli_z",
        }
    }

    pub fn letter(self) -> &'static str {
        match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        }
    }
}

/// Measuring device attached to the system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointerModel {
    GaussianGrid(GaussianGrid),
    /// Qubit pointer. With generator `sigma_a` and cyclic successors `b`, `c`,
    /// the readout is `-sigma_b / 2` and the ready state is the +1 eigenstate
    /// of `sigma_c` (generator `sigma_y`: readout `-sigma_z / 2`, ready `|+x>`).
    Qubit { generator_axis: PauliAxis },
}

impl PointerModel {
    pub fn gaussian(spread: f64) -> Result<Self> {
        Ok(Self::GaussianGrid(GaussianGrid::with_spread(spread)?))
    }

    pub fn qubit() -> Self {
        Self::Qubit { generator_axis: PauliAxis::Y }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::GaussianGrid(grid) => grid.n_points,
            Self::Qubit { .. } => 2,
        }
    }

    /// Position-like spread of the ready state, if the model has one.
    pub fn spread(&self) -> Option<f64> {
        match self {
            Self::GaussianGrid(grid) => Some(grid.spread),
            Self::Qubit { .. } => None,
        }
    }

    /// The ready state `|m>`.
    pub fn initial_state(&self) -> StateVector {
        match self {
            Self::GaussianGrid(grid) => {
                let s2 = grid.spread * grid.spread;
                let amps: Vec<f64> = grid.coordinates().iter().map(|q| (-q * q / (4.0 * s2)).exp()).collect();
                StateVector::from_real(&amps).expect("nonzero gaussian")
            }
            Self::Qubit { generator_axis } => {
                let ready_axis = generator_axis.next().next();
                let amps = match ready_axis {
                    PauliAxis::X => vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
                    PauliAxis::Y => vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)],
                    PauliAxis::Z => vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                };
                StateVector::new(amps).and_then(StateVector::into_normalized).expect("nonzero qubit state")
            }
        }
    }

    /// The readout `Q`, conjugate to the generator.
    pub fn position_operator(&self) -> LinearOperator {
        match self {
            Self::GaussianGrid(grid) => {
                let q = grid.coordinates();
                let entries = DMatrix::from_fn(q.len(), q.len(), |i, j| {
                    if i == j {
                        Complex64::new(q[i], 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                });
                LinearOperator::new(entries).expect("finite coordinates")
            }
            Self::Qubit { generator_axis } => generator_axis.next().operator().scale(-0.5).expect("finite"),
        }
    }

    /// The generator `P` that couples to the system observable.
    pub fn translation_generator(&self) -> LinearOperator {
        match self {
            Self::GaussianGrid(_) => {
                let p = self.translation_spectrum().reconstruct();
                // Round-off leaves ~1e-17 antihermitian residue; remove it.
                let m = p.entries();
                LinearOperator::new((m + m.adjoint()) * Complex64::new(0.5, 0.0)).expect("finite")
            }
            Self::Qubit { generator_axis } => generator_axis.operator(),
        }
    }

    /// Spectral decomposition of the generator.
    pub fn translation_spectrum(&self) -> HermitianEigen {
        match self {
            Self::GaussianGrid(grid) => {
                HermitianEigen::from_parts(grid.wave_numbers(), grid.fourier_modes()).expect("square modes")
            }
            Self::Qubit { generator_axis } => {
                HermitianEigen::of(&generator_axis.operator()).expect("pauli matrices are hermitian")
            }
        }
    }

    /// `exp(-i g P)|psi>`.
    pub fn translate(&self, psi: &StateVector, g: f64) -> Result<StateVector> {
        self.translation_spectrum().evolve(g, psi)
    }
}

/// `<psi|op|psi> / <psi|psi>` for a hermitian `op`.
///
/// Unnormalized (conditional) states are normalized internally.
pub fn moments(state: &StateVector, op: &LinearOperator) -> Result<f64> {
    op.require_hermitian()?;
    let norm_sqr = state.norm_sqr();
    if norm_sqr == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let value = state.inner(&op.apply(state)?)? / norm_sqr;
    if value.im.abs() > REAL_RESIDUE * value.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue(value.im));
    }
    Ok(value.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_grid() -> PointerModel {
        PointerModel::GaussianGrid(GaussianGrid::new(1.0, 16.0, 256).unwrap())
    }

    #[test]
    fn ready_states_are_normalized() {
        for model in [reference_grid(), PointerModel::gaussian(2.0).unwrap(), PointerModel::qubit()] {
            assert!((model.initial_state().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GaussianGrid::new(0.0, 16.0, 256).is_err());
        assert!(GaussianGrid::new(1.0, 16.0, 100).is_err());
        assert!(GaussianGrid::new(1.0, 16.0, 32).is_err());
        // h = 32 / 64 = 0.5 > 1/4.
        assert!(GaussianGrid::new(1.0, 16.0, 64).is_err());
        assert!(GaussianGrid::new(1.0, 7.0, 256).is_err());
        // Eight spreads is allowed by the width rule but leaves exp(-16) at the edge.
        assert!(matches!(GaussianGrid::new(1.0, 8.0, 256), Err(Error::InvalidPointer(msg)) if msg.contains("boundary")));
        assert!(GaussianGrid::new(1.0, 11.0, 128).is_ok());
    }

    #[test]
    fn gaussian_first_moments_vanish() {
        let model = reference_grid();
        let m = model.initial_state();
        assert!(moments(&m, &model.position_operator()).unwrap().abs() < 1e-10);
        assert!(moments(&m, &model.translation_generator()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn gaussian_position_variance_by_quadrature() {
        // Oracle: midpoint quadrature of q^2 |psi|^2 with the analytic density.
        let grid = GaussianGrid::new(1.0, 16.0, 256).unwrap();
        let h = grid.spacing();
        let oracle: f64 = grid
            .coordinates()
            .iter()
            .map(|q| q * q * (-q * q / 2.0).exp() / (2.0 * PI).sqrt() * h)
            .sum();
        assert!((oracle - 1.0).abs() < 1e-10);
        let model = PointerModel::GaussianGrid(grid);
        let q2 = model.position_operator().matmul(&model.position_operator()).unwrap();
        let value = moments(&model.initial_state(), &q2).unwrap();
        assert!((value - oracle).abs() < 1e-6, "{value}");
    }

    #[test]
    fn gaussian_momentum_variance() {
        let model = reference_grid();
        let p = model.translation_generator();
        let p2 = p.matmul(&p).unwrap();
        let value = moments(&model.initial_state(), &p2).unwrap();
        assert!((value - 0.25).abs() < 1e-4, "{value}");
    }

    #[test]
    fn canonical_commutator_on_interior_points() {
        let model = reference_grid();
        let q = model.position_operator();
        let p = model.translation_generator();
        let m = model.initial_state();
        let qp = q.apply(&p.apply(&m).unwrap()).unwrap();
        let pq = p.apply(&q.apply(&m).unwrap()).unwrap();
        let commutator = qp.sub(&pq).unwrap();
        let coords = GaussianGrid::new(1.0, 16.0, 256).unwrap().coordinates();
        for (j, q) in coords.iter().enumerate() {
            if q.abs() < 8.0 {
                let expected = Complex64::new(0.0, 1.0) * m.amps()[j];
                assert!((commutator.amps()[j] - expected).norm() < 1e-6, "q = {q}");
            }
        }
    }

    #[test]
    fn generator_translates_the_packet() {
        let model = reference_grid();
        let grid = GaussianGrid::new(1.0, 16.0, 256).unwrap();
        let g = 1.3;
        let moved = model.translate(&model.initial_state(), g).unwrap();
        let coords = grid.coordinates();
        let peak = moved
            .amps()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(j, _)| coords[j])
            .unwrap();
        assert!((peak - g).abs() <= grid.spacing());
        let mean = moments(&moved, &model.position_operator()).unwrap();
        assert!((mean - g).abs() <= grid.spacing());
    }

    #[test]
    fn repeated_translation_composes() {
        let model = PointerModel::gaussian(2.0).unwrap();
        let m = model.initial_state();
        let g = 0.21;
        let mut stepped = m.clone();
        for _ in 0..5 {
            stepped = model.translate(&stepped, g).unwrap();
        }
        let once = model.translate(&m, 5.0 * g).unwrap();
        assert!(stepped.distance(&once).unwrap() < 1e-9);
    }

    #[test]
    fn qubit_pointer_algebra() {
        for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
            let model = PointerModel::Qubit { generator_axis: axis };
            let p = model.translation_generator();
            assert_eq!(p.matmul(&p).unwrap().max_abs_diff(&LinearOperator::identity(2)).unwrap(), 0.0);
            let m = model.initial_state();
            assert!(moments(&m, &p).unwrap().abs() < 1e-12);
            // <m|[Q, P]|m> = i
            let q = model.position_operator();
            let comm = q.matmul(&p).unwrap().sub(&p.matmul(&q).unwrap()).unwrap();
            let value = m.inner(&comm.apply(&m).unwrap()).unwrap();
            assert!((value - Complex64::new(0.0, 1.0)).norm() < 1e-12, "{axis:?}");
        }
    }

    #[test]
    fn analytic_spectrum_matches_dense_solver() {
        let model = PointerModel::GaussianGrid(GaussianGrid::new(1.0, 12.0, 128).unwrap());
        let analytic = model.translation_spectrum();
        assert!(analytic.evolution(0.0).unitarity_deviation() < 1e-12);
        let dense = HermitianEigen::of(&model.translation_generator()).unwrap();
        let mut a = analytic.values().to_vec();
        let mut d = dense.values().to_vec();
        a.sort_by(f64::total_cmp);
        d.sort_by(f64::total_cmp);
        for (x, y) in a.iter().zip(&d) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn moments_reject_zero_and_non_hermitian() {
        let zero = StateVector::new(vec![Complex64::default(); 2]).unwrap();
        assert_eq!(moments(&zero, &LinearOperator::pauli_z()), Err(Error::ZeroNorm));
        let m = LinearOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(moments(&StateVector::basis(2, 0).unwrap(), &m), Err(Error::NotHermitian(_))));
    }
}
