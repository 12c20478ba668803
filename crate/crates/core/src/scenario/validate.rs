//! Physics-level checks on a parsed document.

use std::collections::BTreeMap;

use crate::interferometer::{build_nested_mzi, OpticalNetwork};
use crate::limits::{geometric_schedule, LimitPlan};
use crate::pointer::{GaussianGrid, PauliAxis, PointerModel, DEFAULT_HALF_WIDTH_SPREADS, DEFAULT_POINTS};
use crate::qcore::{LinearOperator, StateVector};
use crate::tolerance::{AUTO_NORMALIZE, STRUCTURAL};
use crate::weakmeas::{default_schedule, validate_schedule, PrePostSelection};

use super::text::{Diagnostic, Position};
use super::{ExperimentPlan, GRange, NetworkPreset, NetworkSpec, PointerSpec, ScenarioDoc};

/// Spread of the pointer used when a scenario has no `[pointer]` section.
pub const DEFAULT_SPREAD: f64 = 2.0;

/// A validated scenario with its runtime objects built.
#[derive(Debug, Clone)]
pub struct Scenario {
    doc: ScenarioDoc,
    warnings: Vec<Diagnostic>,
    pointer: PointerModel,
    selection: Option<PrePostSelection>,
    network: Option<OpticalNetwork>,
}

impl Scenario {
    pub fn doc(&self) -> &ScenarioDoc {
        &self.doc
    }

    pub fn warnings(&self) -> &[Diagnostic] {
        &self.warnings
    }

    pub fn plan(&self) -> &ExperimentPlan {
        &self.doc.experiment
    }

    pub fn pointer(&self) -> &PointerModel {
        &self.pointer
    }

    pub fn selection(&self) -> Option<&PrePostSelection> {
        self.selection.as_ref()
    }

    pub fn network(&self) -> Option<&OpticalNetwork> {
        self.network.as_ref()
    }

    /// The operator measured by the plan, if it has one.
    pub fn observable(&self) -> Option<&LinearOperator> {
        self.doc.experiment.observable().and_then(|name| self.doc.operator(name))
    }

    /// Geometric `g` schedule of sweep, trace and presence plans.
    pub fn g_values(&self) -> Option<Vec<f64>> {
        match &self.doc.experiment {
            ExperimentPlan::Sweep { range, .. }
            | ExperimentPlan::Trace { range, .. }
            | ExperimentPlan::Presence { range, .. } => {
                let (hi, lo, n) = range.resolved();
                geometric_schedule(hi, lo, n).ok()
            }
            _ => None,
        }
    }

    /// Schedule for a weak-value plan: the one given, or the pointer default.
    pub fn weak_schedule(&self) -> Vec<f64> {
        match &self.doc.experiment {
            ExperimentPlan::WeakValue { schedule: Some(s), .. } => s.clone(),
            _ => default_schedule(&self.pointer),
        }
    }

    /// Arms named by a trace or presence plan, or every arm of the network.
    pub fn arms(&self) -> Vec<String> {
        let given = match &self.doc.experiment {
            ExperimentPlan::Trace { arms, .. } | ExperimentPlan::Presence { arms, .. } => arms.clone(),
            _ => None,
        };
        given.unwrap_or_else(|| self.network.as_ref().map(OpticalNetwork::arm_labels).unwrap_or_default())
    }

    pub fn limit_plan(&self) -> Option<LimitPlan> {
        let ExperimentPlan::CompareLimits { fixed_spread, g_schedule, fixed_g, spreads, .. } = &self.doc.experiment
        else {
            return None;
        };
        let defaults = LimitPlan::default();
        let fixed_spread = fixed_spread.unwrap_or(defaults.fixed_spread);
        let g_schedule = match g_schedule {
            Some(s) => s.clone(),
            None => default_schedule(&PointerModel::gaussian(fixed_spread).ok()?),
        };
        Some(LimitPlan {
            fixed_spread,
            g_schedule,
            fixed_g: fixed_g.unwrap_or(defaults.fixed_g),
            spread_schedule: spreads.clone().unwrap_or(defaults.spread_schedule),
        })
    }
}

fn pointer_model(spec: &PointerSpec) -> crate::Result<PointerModel> {
    match *spec {
        PointerSpec::Gaussian { spread, points, half_width } => {
            let half_width = half_width.unwrap_or(DEFAULT_HALF_WIDTH_SPREADS * spread);
            GaussianGrid::new(spread, half_width, points.unwrap_or(DEFAULT_POINTS)).map(PointerModel::GaussianGrid)
        }
        PointerSpec::Qubit { axis } => Ok(PointerModel::Qubit { generator_axis: axis.unwrap_or(PauliAxis::Y) }),
    }
}

fn check_range(range: &GRange, min_points: usize, needs_decade: bool, at: Position) -> Result<(), Diagnostic> {
    let (hi, lo, n) = range.resolved();
    if !(lo > 0.0 && hi > lo) {
        return Err(Diagnostic::error(at, format!("need 0 < g_min < g_max, got g_min = {lo}, g_max = {hi}")));
    }
    if n < min_points {
        return Err(Diagnostic::error(at, format!("need at least {min_points} points, got {n}")));
    }
    if needs_decade && hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(Diagnostic::error(at, "order fits need g_max / g_min of at least 10"));
    }
    Ok(())
}

/// Checks hermiticity of the measured observable, normalization of the
/// selected states and the plan's parameter ranges, and builds the pointer,
/// selection and network.
///
/// Warnings (such as auto-normalization) are kept on the returned scenario;
/// on failure every diagnostic, warnings included, is returned.
pub fn validate_semantics(doc: &ScenarioDoc) -> Result<Scenario, Vec<Diagnostic>> {
    let mut errors: Vec<Diagnostic> = Vec::new();
    let mut warnings: Vec<Diagnostic> = Vec::new();
    let src = &doc.source;
    let plan = &doc.experiment;
    let plan_at = |key: &str| src.get(&format!("experiment.{key}"));
    let experiment_at = src.get("experiment");

    if let Some(name) = plan.observable() {
        match doc.operator(name) {
            Some(op) if !op.is_hermitian() => errors.push(Diagnostic::error(
                plan_at("observable"),
                format!("observable `{name}` is not hermitian (deviation {:e})", op.hermitian_deviation()),
            )),
            Some(_) => {}
            None => errors.push(Diagnostic::error(plan_at("observable"), format!("unknown operator `{name}`"))),
        }
    }

    let pointer = match &doc.pointer {
        Some(spec) => match pointer_model(spec) {
            Ok(model) => Some(model),
            Err(e) => {
                errors.push(Diagnostic::error(src.get("pointer"), e.to_string()));
                None
            }
        },
        None => Some(PointerModel::gaussian(DEFAULT_SPREAD).expect("valid default")),
    };

    let mut normalized: BTreeMap<&str, StateVector> = BTreeMap::new();
    let selection = doc.selection.as_ref().and_then(|sel| {
        for name in [&sel.pre, &sel.post] {
            if normalized.contains_key(name.as_str()) {
                continue;
            }
            let Some(amps) = doc.states.get(name) else {
                errors.push(Diagnostic::error(src.get("selection.pre"), format!("unknown state `{name}`")));
                continue;
            };
            let at = src.get(&format!("state {name}"));
            let state = match StateVector::new(amps.clone()) {
                Ok(s) => s,
                Err(e) => {
                    errors.push(Diagnostic::error(at, e.to_string()));
                    continue;
                }
            };
            let norm = state.norm();
            if (norm * norm - 1.0).abs() <= STRUCTURAL {
                normalized.insert(name, state.into_normalized().expect("unit norm"));
            } else if (norm - 1.0).abs() < AUTO_NORMALIZE {
                warnings.push(Diagnostic::warning(at, format!("state `{name}` has norm {norm}; normalized")));
                normalized.insert(name, state.into_normalized().expect("near unit norm"));
            } else {
                errors.push(Diagnostic::error(at, format!("state `{name}` is not normalized (norm {norm})")));
            }
        }
        let pre = normalized.get(sel.pre.as_str())?.clone();
        let post = normalized.get(sel.post.as_str())?.clone();
        match PrePostSelection::new(pre, post) {
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(Diagnostic::error(src.get("selection.pre"), e.to_string()));
                None
            }
        }
    });

    let network = match &doc.network {
        Some(NetworkSpec::Preset(NetworkPreset::NestedMzi)) => Some(build_nested_mzi()),
        Some(NetworkSpec::Custom(d)) => match OpticalNetwork::new(
            d.modes,
            d.elements.clone(),
            d.slices.clone(),
            d.source,
            d.detectors.clone(),
            &d.postselect,
        ) {
            Ok(net) => Some(net),
            Err(e) => {
                errors.push(Diagnostic::error(src.get("network"), e.to_string()));
                None
            }
        },
        None => None,
    };

    let needs_selection = matches!(
        plan,
        ExperimentPlan::WeakValue { .. } | ExperimentPlan::Sweep { .. } | ExperimentPlan::CompareLimits { .. }
    );
    if needs_selection && doc.selection.is_none() {
        errors.push(Diagnostic::error(experiment_at, format!("experiment `{}` needs a [selection] section", plan.kind())));
    }
    let needs_network = matches!(plan, ExperimentPlan::Trace { .. } | ExperimentPlan::Presence { .. });
    if needs_network && doc.network.is_none() {
        errors.push(Diagnostic::error(experiment_at, format!("experiment `{}` needs a [network] section", plan.kind())));
    }

    let schedule_error = |key: &str, schedule: &[f64], min: usize| {
        validate_schedule(schedule, min).err().map(|e| {
            let message = match e {
                crate::Error::InvalidSchedule(m) => m,
                other => other.to_string(),
            };
            Diagnostic::error(plan_at(key), message)
        })
    };
    match plan {
        ExperimentPlan::WeakValue { schedule: Some(s), .. } => errors.extend(schedule_error("schedule", s, 4)),
        ExperimentPlan::WeakValue { schedule: None, .. } => {}
        ExperimentPlan::Sweep { range, .. } | ExperimentPlan::Presence { range, .. } => {
            if let Err(d) = check_range(range, 4, true, experiment_at) {
                errors.push(d);
            }
        }
        ExperimentPlan::Trace { range, .. } => {
            if let Err(d) = check_range(range, 2, false, experiment_at) {
                errors.push(d);
            }
        }
        ExperimentPlan::CompareLimits { fixed_spread, g_schedule, fixed_g, spreads, .. } => {
            if let Some(s) = g_schedule {
                errors.extend(schedule_error("g_schedule", s, 1));
            }
            if let Some(g) = fixed_g.filter(|g| g.is_nan() || *g <= 0.0) {
                errors.push(Diagnostic::error(plan_at("fixed_g"), format!("fixed_g must be positive, got {g}")));
            }
            if let Some(spread) = fixed_spread {
                if let Err(e) = GaussianGrid::with_spread(*spread) {
                    errors.push(Diagnostic::error(plan_at("fixed_spread"), e.to_string()));
                }
            }
            if let Some(s) = spreads {
                if s.windows(2).any(|w| w[1] <= w[0]) {
                    errors.push(Diagnostic::error(plan_at("spreads"), "spreads must increase"));
                } else if let Some(e) = s.iter().find_map(|&d| GaussianGrid::with_spread(d).err()) {
                    errors.push(Diagnostic::error(plan_at("spreads"), e.to_string()));
                }
            }
        }
    }

    if let (Some(net), Some(arms)) = (&network, plan_arms(plan)) {
        let known = net.arm_labels();
        if let Some(bad) = arms.iter().find(|a| !known.contains(a)) {
            errors.push(Diagnostic::error(plan_at("arms"), format!("network has no arm `{bad}`")));
        }
    }

    if !errors.is_empty() {
        errors.extend(warnings);
        errors.sort_by_key(|d| d.position);
        return Err(errors);
    }
    Ok(Scenario {
        doc: doc.clone(),
        warnings,
        pointer: pointer.expect("no pointer errors"),
        selection,
        network,
    })
}

fn plan_arms(plan: &ExperimentPlan) -> Option<&Vec<String>> {
    match plan {
        ExperimentPlan::Trace { arms, .. } | ExperimentPlan::Presence { arms, .. } => arms.as_ref(),
        _ => None,
    }
}
