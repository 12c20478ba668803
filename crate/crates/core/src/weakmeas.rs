//! Expectation values, weak values and the simulated measurement pipeline.
//!
//! The pipeline prepares `|in> (x) |m>`, applies `exp(-i g S (x) P)`, projects
//! the system onto `<out|` and reads the pointer. To first order in `g` the
//! conditional readouts are
//!
//! ```text
//! <Q> = g Re(w)        <P> = 2 g Var_m(P) Im(w)
//! ```
//!
//! with `w = <out|S|in> / <out|in>`. [`estimate_weak_value`] evaluates these
//! ratios over a decreasing schedule of `g` and extrapolates them to `g = 0`
//! with a straight-line fit.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pointer::{moments, PointerModel};
use crate::qcore::{first_order_state, tensor_product, Coupling, JointState, LinearOperator, StateVector};
use crate::tolerance::{DARK_PROBABILITY, OVERLAP_THRESHOLD, STRUCTURAL};

/// Pre-selected `|in>` and post-selected `|out>` states.
#[derive(Debug, Clone, PartialEq)]
pub struct PrePostSelection {
    pre: StateVector,
    post: StateVector,
    overlap: Complex64,
}

impl PrePostSelection {
    pub fn new(pre: StateVector, post: StateVector) -> Result<Self> {
        for state in [&pre, &post] {
            if (state.norm_sqr() - 1.0).abs() > STRUCTURAL {
                return Err(Error::NotNormalized(state.norm()));
            }
        }
        let overlap = post.inner(&pre)?;
        Ok(Self { pre, post, overlap })
    }

    pub fn pre(&self) -> &StateVector {
        &self.pre
    }

    pub fn post(&self) -> &StateVector {
        &self.post
    }

    pub fn dim(&self) -> usize {
        self.pre.dim()
    }

    /// `<out|in>`.
    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }
}

/// Swaps pre- and post-selection.
pub fn time_reverse(sel: &PrePostSelection) -> PrePostSelection {
    PrePostSelection { pre: sel.post.clone(), post: sel.pre.clone(), overlap: sel.overlap.conj() }
}

/// `<state|S|state>` for hermitian `S`.
pub fn expectation(state: &StateVector, s: &LinearOperator) -> Result<f64> {
    moments(state, s)
}

/// `<out|S|in> / <out|in>`.
pub fn weak_value(sel: &PrePostSelection, s: &LinearOperator) -> Result<Complex64> {
    let magnitude = sel.overlap.norm();
    if magnitude <= OVERLAP_THRESHOLD {
        return Err(Error::NearOrthogonal(magnitude));
    }
    let numerator = sel.post.inner(&s.apply(&sel.pre)?)?;
    Ok(numerator / sel.overlap)
}

/// The pointer branch kept after post-selecting the system on `<out|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelectedPointer {
    pub pointer_state: StateVector,
    pub probability: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    Analytic,
    PointerNumeric,
    FirstOrder,
}

impl EstimateMethod {
    pub fn name(self) -> &'static str {
        match self {
            EstimateMethod::Analytic => "analytic",
            EstimateMethod::PointerNumeric => "pointer_numeric",
            EstimateMethod::FirstOrder => "first_order",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakValueEstimate {
    pub value: Complex64,
    pub method: EstimateMethod,
    /// Empty for analytic estimates.
    pub g_schedule: Vec<f64>,
    /// Max distance of the per-`g` ratios from the fitted line; zero when analytic.
    pub extrapolation_residual: f64,
}

impl WeakValueEstimate {
    pub fn analytic(sel: &PrePostSelection, s: &LinearOperator) -> Result<Self> {
        Ok(Self {
            value: weak_value(sel, s)?,
            method: EstimateMethod::Analytic,
            g_schedule: Vec::new(),
            extrapolation_residual: 0.0,
        })
    }
}

/// An observable wired to a pointer, with the pointer spectra precomputed.
///
/// Reusing one apparatus across a `g` schedule avoids rebuilding the pointer
/// eigenbasis for every point.
#[derive(Debug, Clone)]
pub struct Apparatus {
    model: PointerModel,
    observable: LinearOperator,
    ready: StateVector,
    readout: LinearOperator,
    generator: LinearOperator,
    generator_variance: f64,
    coupling: Coupling,
}

impl Apparatus {
    pub fn new(observable: &LinearOperator, model: &PointerModel) -> Result<Self> {
        observable.require_hermitian()?;
        let system = crate::qcore::HermitianEigen::of(observable)?;
        let coupling = Coupling::from_spectra(system, model.translation_spectrum());
        let ready = model.initial_state();
        let generator = model.translation_generator();
        let generator_variance = moments(&ready, &generator.matmul(&generator)?)?;
        Ok(Self {
            model: *model,
            observable: observable.clone(),
            readout: model.position_operator(),
            ready,
            generator,
            generator_variance,
            coupling,
        })
    }

    pub fn model(&self) -> &PointerModel {
        &self.model
    }

    pub fn ready_state(&self) -> &StateVector {
        &self.ready
    }

    pub fn generator(&self) -> &LinearOperator {
        &self.generator
    }

    pub fn observable(&self) -> &LinearOperator {
        &self.observable
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    /// `<m|P^2|m>`; equals `Var_m(P)` since `<m|P|m> = 0`.
    pub fn generator_variance(&self) -> f64 {
        self.generator_variance
    }

    /// `|in> (x) |m>`.
    pub fn initial(&self, input: &StateVector) -> Result<JointState> {
        self.observable.check_dim(input.dim())?;
        Ok(tensor_product(input, &self.ready))
    }

    /// `U(g) (|in> (x) |m>)`.
    pub fn evolve(&self, input: &StateVector, g: f64) -> Result<JointState> {
        self.coupling.apply(g, &self.initial(input)?)
    }

    /// The first-order truncation of [`Apparatus::evolve`].
    pub fn evolve_first_order(&self, input: &StateVector, g: f64) -> Result<JointState> {
        first_order_state(input, &self.ready, &self.observable, &self.generator, g)
    }

    pub fn measure(&self, sel: &PrePostSelection, g: f64) -> Result<PostSelectedPointer> {
        if !g.is_finite() {
            return Err(Error::InvalidSchedule(format!("non-finite coupling {g}")));
        }
        let joint = self.evolve(sel.pre(), g)?;
        post_select(&joint, sel.post(), g)
    }

    /// Weak-value ratio read off the conditional pointer at a single `g`.
    pub fn point_estimate(&self, sel: &PrePostSelection, g: f64) -> Result<Complex64> {
        let branch = self.measure(sel, g)?;
        self.ratio(&branch.pointer_state, g)
    }

    fn first_order_point_estimate(&self, sel: &PrePostSelection, g: f64) -> Result<Complex64> {
        let joint = self.evolve_first_order(sel.pre(), g)?;
        let branch = post_select(&joint, sel.post(), g)?;
        self.ratio(&branch.pointer_state, g)
    }

    fn ratio(&self, pointer: &StateVector, g: f64) -> Result<Complex64> {
        let q = moments(pointer, &self.readout)?;
        let p = moments(pointer, &self.generator)?;
        Ok(Complex64::new(q / g, p / (2.0 * g * self.generator_variance)))
    }
}

fn post_select(joint: &JointState, post: &StateVector, g: f64) -> Result<PostSelectedPointer> {
    let pointer_state = joint.project_system(post)?;
    let probability = pointer_state.norm_sqr();
    if probability < DARK_PROBABILITY {
        return Err(Error::OrthogonalPostSelection { g, probability });
    }
    Ok(PostSelectedPointer { pointer_state, probability, g })
}

/// One run of the full pipeline at coupling `g`.
pub fn measure_once(
    sel: &PrePostSelection,
    s: &LinearOperator,
    model: &PointerModel,
    g: f64,
) -> Result<PostSelectedPointer> {
    Apparatus::new(s, model)?.measure(sel, g)
}

/// Geometric schedule of five couplings, ratio 2, starting at `0.02 * spread`
/// (or at 0.02 for pointers without a spread).
pub fn default_schedule(model: &PointerModel) -> Vec<f64> {
    let start = 0.02 * model.spread().unwrap_or(1.0);
    (0..5).map(|k| start / f64::powi(2.0, k)).collect()
}

/// Checks that a schedule is finite, positive and strictly decreasing.
pub fn validate_schedule(schedule: &[f64], min_points: usize) -> Result<()> {
    if schedule.len() < min_points {
        return Err(Error::InvalidSchedule(format!(
            "need at least {min_points} points, got {}",
            schedule.len()
        )));
    }
    if let Some(g) = schedule.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::InvalidSchedule(format!("couplings must be positive and finite, got {g}")));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSchedule("schedule must decrease".into()));
    }
    Ok(())
}

/// Pointer-based weak value extrapolated to `g -> 0`.
pub fn estimate_weak_value(
    sel: &PrePostSelection,
    s: &LinearOperator,
    model: &PointerModel,
    schedule: &[f64],
) -> Result<WeakValueEstimate> {
    Apparatus::new(s, model)?.estimate(sel, schedule)
}

impl Apparatus {
    pub fn estimate(&self, sel: &PrePostSelection, schedule: &[f64]) -> Result<WeakValueEstimate> {
        validate_schedule(schedule, 4)?;
        let ratios = schedule.iter().map(|&g| self.point_estimate(sel, g)).collect::<Result<Vec<_>>>()?;
        Ok(extrapolate(schedule, &ratios, EstimateMethod::PointerNumeric))
    }

    /// Same extrapolation, but on the first-order truncated state.
    pub fn estimate_first_order(&self, sel: &PrePostSelection, schedule: &[f64]) -> Result<WeakValueEstimate> {
        validate_schedule(schedule, 4)?;
        let ratios = schedule
            .iter()
            .map(|&g| self.first_order_point_estimate(sel, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(extrapolate(schedule, &ratios, EstimateMethod::FirstOrder))
    }
}

/// Least-squares line through `(g, ratio)`; the intercept is the estimate.
fn extrapolate(schedule: &[f64], ratios: &[Complex64], method: EstimateMethod) -> WeakValueEstimate {
    let n = schedule.len() as f64;
    let mean_g = schedule.iter().sum::<f64>() / n;
    let mean_r = ratios.iter().sum::<Complex64>() / n;
    let sxx: f64 = schedule.iter().map(|g| (g - mean_g).powi(2)).sum();
    let sxy: Complex64 = schedule.iter().zip(ratios).map(|(g, r)| (r - mean_r) * (g - mean_g)).sum();
    let slope = sxy / sxx;
    let intercept = mean_r - slope * mean_g;
    let residual = schedule
        .iter()
        .zip(ratios)
        .map(|(g, r)| (r - (intercept + slope * g)).norm())
        .fold(0.0, f64::max);
    WeakValueEstimate { value: intercept, method, g_schedule: schedule.to_vec(), extrapolation_residual: residual }
}
