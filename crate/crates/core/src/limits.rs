//! Behaviour of the coupled state as `g -> 0`.
//!
//! Metrics are evaluated over a decreasing `g` schedule and summarized by the
//! slope of a least-squares line in `(ln g, ln metric)`: a metric behaving as
//! `C g^n` has fitted order `n` and coefficient `C`. Values at or below
//! [`METRIC_FLOOR`] count as identically zero and are left out of the fit; a
//! metric with fewer than four usable points is reported with the infinite
//! "all-floor" order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pointer::PointerModel;
use crate::qcore::{tensor_product, Coupling, JointState, LinearOperator, StateVector};
pub use crate::tolerance::METRIC_FLOOR;
use crate::weakmeas::{default_schedule, validate_schedule, weak_value, Apparatus, PrePostSelection};

const MIN_FIT_POINTS: usize = 4;

/// Result of a log-log fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    /// Slope in log-log space, or `f64::INFINITY` when every point is at the floor.
    pub order: f64,
    pub coefficient: f64,
    /// Max absolute deviation from the fitted line in log space.
    pub residual: f64,
    /// Points excluded for lying at or below the floor.
    pub floored: usize,
}

impl OrderFit {
    pub fn all_floor(floored: usize) -> Self {
        Self { order: f64::INFINITY, coefficient: 0.0, residual: 0.0, floored }
    }

    pub fn is_all_floor(&self) -> bool {
        self.order.is_infinite()
    }
}

/// Fits `metric ~ coefficient * g^order`.
pub fn fit_order(g_values: &[f64], metric_values: &[f64]) -> Result<OrderFit> {
    if g_values.len() != metric_values.len() {
        return Err(Error::DimensionMismatch { expected: g_values.len(), got: metric_values.len() });
    }
    if g_values.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { usable: g_values.len(), needed: MIN_FIT_POINTS });
    }
    if let Some(g) = g_values.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::InvalidSchedule(format!("couplings must be positive and finite, got {g}")));
    }
    let usable: Vec<(f64, f64)> = g_values
        .iter()
        .zip(metric_values)
        .filter(|(_, m)| **m > METRIC_FLOOR)
        .map(|(g, m)| (g.ln(), m.ln()))
        .collect();
    let floored = g_values.len() - usable.len();
    if usable.len() < MIN_FIT_POINTS {
        return Ok(OrderFit::all_floor(floored));
    }
    let (lo, hi) = usable.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (x, _)| (lo.min(*x), hi.max(*x)));
    if hi - lo < std::f64::consts::LN_10 * (1.0 - 1e-9) {
        return Err(Error::InvalidSchedule(format!("fit needs a decade of g, got a ratio of {:.3}", (hi - lo).exp())));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let order = sxy / sxx;
    let intercept = my - order * mx;
    let residual = usable.iter().map(|(x, y)| (y - intercept - order * x).abs()).fold(0.0, f64::max);
    Ok(OrderFit { order, coefficient: intercept.exp(), residual, floored })
}

/// Leading-order class of a fitted metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderClass {
    First,
    Second,
    AllFloor,
}

/// First order: `[0.75, 1.25]`; second order: `[1.75, 2.5]`; anything else is
/// [`Error::Unclassified`].
pub fn classify_order(fit: &OrderFit) -> Result<OrderClass> {
    match fit.order {
        o if o.is_infinite() && o > 0.0 => Ok(OrderClass::AllFloor),
        o if (0.75..=1.25).contains(&o) => Ok(OrderClass::First),
        o if (1.75..=2.5).contains(&o) => Ok(OrderClass::Second),
        o => Err(Error::Unclassified(o)),
    }
}

/// `n` geometric points from `g_max` down to `g_min`.
pub fn geometric_schedule(g_max: f64, g_min: f64, n: usize) -> Result<Vec<f64>> {
    if !(g_max.is_finite() && g_min.is_finite() && g_min > 0.0 && g_max > g_min) || n < 2 {
        return Err(Error::InvalidSchedule(format!("need 0 < g-min < g-max and >= 2 points, got [{g_min}, {g_max}] x {n}")));
    }
    let step = (g_min / g_max).ln() / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|k| g_max * (step * k as f64).exp()).collect();
    out[n - 1] = g_min;
    Ok(out)
}

/// `g` from 1e-2 down to 1e-4 in nine geometric steps.
pub fn default_decade() -> Vec<f64> {
    geometric_schedule(1e-2, 1e-4, 9).expect("valid constants")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `||U(g) Psi0 - Psi0||`.
    Continuity,
    /// Norm of the part of `U(g) Psi0` orthogonal to `|in>` on the system factor.
    Derail,
    /// `||U(g) Psi0 - first_order_state(g)||`.
    FirstOrderResidual,
    /// `1 - |<Psi0|U(g) Psi0>|`.
    OverlapDeficit,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Continuity, Metric::Derail, Metric::FirstOrderResidual, Metric::OverlapDeficit];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Continuity => "continuity",
            Metric::Derail => "derail",
            Metric::FirstOrderResidual => "first_order_residual",
            Metric::OverlapDeficit => "overlap_deficit",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub metric: Metric,
    pub g_values: Vec<f64>,
    pub metric_values: Vec<f64>,
    pub fit: OrderFit,
}

impl SweepResult {
    pub fn fitted_order(&self) -> f64 {
        self.fit.order
    }

    pub fn fitted_coefficient(&self) -> f64 {
        self.fit.coefficient
    }

    pub fn fit_residual(&self) -> f64 {
        self.fit.residual
    }
}

/// A pre-selected state wired to a pointer, for evaluating limit metrics.
#[derive(Debug, Clone)]
pub struct Probe {
    input: StateVector,
    ready: StateVector,
    observable: LinearOperator,
    generator: LinearOperator,
    coupling: Coupling,
    initial: JointState,
}

impl Probe {
    pub fn new(input: &StateVector, observable: &LinearOperator, model: &PointerModel) -> Result<Self> {
        let apparatus = Apparatus::new(observable, model)?;
        Self::from_parts(
            input,
            apparatus.ready_state(),
            observable,
            apparatus.generator(),
            apparatus.coupling().clone(),
        )
    }

    /// Generic form: any ready state `|m>` and pointer generator `P`.
    pub fn with_pointer(
        input: &StateVector,
        ready: &StateVector,
        observable: &LinearOperator,
        generator: &LinearOperator,
    ) -> Result<Self> {
        Self::from_parts(input, ready, observable, generator, Coupling::new(observable, generator)?)
    }

    fn from_parts(
        input: &StateVector,
        ready: &StateVector,
        observable: &LinearOperator,
        generator: &LinearOperator,
        coupling: Coupling,
    ) -> Result<Self> {
        observable.check_dim(input.dim())?;
        generator.check_dim(ready.dim())?;
        Ok(Self {
            input: input.clone(),
            ready: ready.clone(),
            observable: observable.clone(),
            generator: generator.clone(),
            initial: tensor_product(input, ready),
            coupling,
        })
    }

    pub fn evolved(&self, g: f64) -> Result<JointState> {
        self.coupling.apply(g, &self.initial)
    }

    pub fn continuity(&self, g: f64) -> Result<f64> {
        self.evolved(g)?.distance(&self.initial)
    }

    pub fn derail(&self, g: f64) -> Result<f64> {
        if g == 0.0 {
            return Ok(0.0);
        }
        let evolved = self.evolved(g)?;
        let along = evolved.project_system(&self.input)?;
        let kept = tensor_product(&self.input, &along);
        evolved.distance(&kept)
    }

    pub fn first_order_residual(&self, g: f64) -> Result<f64> {
        let linear = crate::qcore::first_order_state(&self.input, &self.ready, &self.observable, &self.generator, g)?;
        self.evolved(g)?.distance(&linear)
    }

    pub fn overlap_deficit(&self, g: f64) -> Result<f64> {
        let overlap = self.initial.state().inner(self.evolved(g)?.state())?;
        Ok((1.0 - overlap.norm()).max(0.0))
    }

    pub fn evaluate(&self, metric: Metric, g: f64) -> Result<f64> {
        match metric {
            Metric::Continuity => self.continuity(g),
            Metric::Derail => self.derail(g),
            Metric::FirstOrderResidual => self.first_order_residual(g),
            Metric::OverlapDeficit => self.overlap_deficit(g),
        }
    }

    /// `||S|in>|| * ||P|m>||`, the first-order coefficient of the continuity metric.
    pub fn first_order_coefficient(&self) -> Result<f64> {
        Ok(self.observable.apply(&self.input)?.norm() * self.generator.apply(&self.ready)?.norm())
    }

    pub fn sweep(&self, metric: Metric, schedule: &[f64]) -> Result<SweepResult> {
        validate_schedule(schedule, MIN_FIT_POINTS)?;
        let values = schedule.iter().map(|&g| self.evaluate(metric, g)).collect::<Result<Vec<_>>>()?;
        let fit = fit_order(schedule, &values)?;
        Ok(SweepResult { metric, g_values: schedule.to_vec(), metric_values: values, fit })
    }
}

/// `||U(g)(|in> (x) |m>) - |in> (x) |m>||`.
pub fn continuity_metric(
    input: &StateVector,
    ready: &StateVector,
    s: &LinearOperator,
    p: &LinearOperator,
    g: f64,
) -> Result<f64> {
    Probe::with_pointer(input, ready, s, p)?.continuity(g)
}

/// `||((I - |in><in|) (x) I) U(g)(|in> (x) |m>)||`.
pub fn derail_metric(
    input: &StateVector,
    ready: &StateVector,
    s: &LinearOperator,
    p: &LinearOperator,
    g: f64,
) -> Result<f64> {
    Probe::with_pointer(input, ready, s, p)?.derail(g)
}

/// Couplings and spreads for [`compare_limits`].
#[derive(Debug, Clone, PartialEq)]
pub struct LimitPlan {
    /// Pointer spread held fixed while `g` decreases.
    pub fixed_spread: f64,
    pub g_schedule: Vec<f64>,
    /// Coupling held fixed while the spread grows.
    pub fixed_g: f64,
    pub spread_schedule: Vec<f64>,
}

impl Default for LimitPlan {
    fn default() -> Self {
        let fixed_spread = 2.0;
        let model = PointerModel::gaussian(fixed_spread).expect("valid default spread");
        Self {
            fixed_spread,
            g_schedule: default_schedule(&model),
            fixed_g: 0.5,
            spread_schedule: vec![1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    /// `g` on the coupling route, the spread on the spread route.
    pub parameter: f64,
    pub estimate: Complex64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitComparison {
    pub analytic: Complex64,
    /// `g -> 0` at fixed spread, in schedule order (decreasing `g`).
    pub coupling_route: Vec<TrajectoryPoint>,
    /// Spread growing at fixed `g`.
    pub spread_route: Vec<TrajectoryPoint>,
}

impl LimitComparison {
    pub fn finest_coupling_deviation(&self) -> f64 {
        self.coupling_route.last().map_or(f64::NAN, |p| p.deviation)
    }

    pub fn finest_spread_deviation(&self) -> f64 {
        self.spread_route.last().map_or(f64::NAN, |p| p.deviation)
    }
}

/// Reads the weak value off the Gaussian pointer along both weak-limit routes.
///
/// Each trajectory point is the single-`g` ratio (no extrapolation), so the
/// trajectories show how each route approaches the analytic value.
pub fn compare_limits(sel: &PrePostSelection, s: &LinearOperator, plan: &LimitPlan) -> Result<LimitComparison> {
    validate_schedule(&plan.g_schedule, 1)?;
    if !(plan.fixed_g.is_finite() && plan.fixed_g > 0.0) {
        return Err(Error::InvalidSchedule(format!("fixed coupling must be positive, got {}", plan.fixed_g)));
    }
    if plan.spread_schedule.is_empty() || plan.spread_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidSchedule("spread schedule must be non-empty and increasing".into()));
    }
    let analytic = weak_value(sel, s)?;
    let point = |parameter: f64, estimate: Complex64| TrajectoryPoint {
        parameter,
        estimate,
        deviation: (estimate - analytic).norm(),
    };

    let fixed = Apparatus::new(s, &PointerModel::gaussian(plan.fixed_spread)?)?;
    let coupling_route = plan
        .g_schedule
        .iter()
        .map(|&g| fixed.point_estimate(sel, g).map(|w| point(g, w)))
        .collect::<Result<Vec<_>>>()?;

    let spread_route = plan
        .spread_schedule
        .iter()
        .map(|&spread| {
            let apparatus = Apparatus::new(s, &PointerModel::gaussian(spread)?)?;
            apparatus.point_estimate(sel, plan.fixed_g).map(|w| point(spread, w))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(LimitComparison { analytic, coupling_route, spread_route })
}
