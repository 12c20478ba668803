//! One function per experiment; each turns a validated scenario into a table.

use weaklab_core::interferometer::{arm_weak_value, classify_presence, trace_table, OpticalNetwork};
use weaklab_core::limits::{compare_limits, geometric_schedule, Metric, Probe};
use weaklab_core::scenario::{ExperimentPlan, GRange, Scenario};
use weaklab_core::weakmeas::{estimate_weak_value, WeakValueEstimate};
use weaklab_core::{LinearOperator, PrePostSelection};

use crate::args::{Experiment, Input};
use crate::table::{Cell, Table};
use crate::Failure;

pub fn execute(experiment: &Experiment, scn: &Scenario) -> Result<Table, Failure> {
    match experiment {
        Experiment::Weakvalue { input, observable } => weakvalue(scn, input, observable.as_deref()),
        Experiment::Sweep { input, observable, metric } => {
            let metric = match (metric, scn.plan()) {
                (Some(m), _) => (*m).into(),
                (None, ExperimentPlan::Sweep { metric, .. }) => *metric,
                (None, _) => Metric::Continuity,
            };
            sweep(scn, input, observable.as_deref(), metric)
        }
        Experiment::Trace { input, arms } => trace(scn, input, arms.as_deref()),
        Experiment::Presence { input, arms } => presence(scn, input, arms.as_deref()),
        Experiment::CompareLimits { input, observable } => limits(scn, input, observable.as_deref()),
    }
}

fn runtime(e: weaklab_core::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn observable<'a>(scn: &'a Scenario, name: Option<&'a str>) -> Result<(&'a str, &'a LinearOperator), Failure> {
    let name = name
        .or_else(|| scn.plan().observable())
        .ok_or_else(|| Failure::input("scenario names no observable; pass --observable"))?;
    let op = scn.doc().operator(name).ok_or_else(|| Failure::input(format!("unknown operator `{name}`")))?;
    if !op.is_hermitian() {
        return Err(Failure::input(format!("observable `{name}` is not hermitian")));
    }
    Ok((name, op))
}

fn selection(scn: &Scenario) -> Result<&PrePostSelection, Failure> {
    scn.selection().ok_or_else(|| Failure::input("scenario has no [selection] section"))
}

fn network(scn: &Scenario) -> Result<&OpticalNetwork, Failure> {
    scn.network().ok_or_else(|| Failure::input("scenario has no [network] section"))
}

/// The plan's own range (or the default), with any command-line overrides.
fn g_range(scn: &Scenario, input: &Input, min_points: usize, needs_decade: bool) -> Result<Vec<f64>, Failure> {
    let range = match scn.plan() {
        ExperimentPlan::Sweep { range, .. }
        | ExperimentPlan::Trace { range, .. }
        | ExperimentPlan::Presence { range, .. } => *range,
        _ => GRange::default(),
    };
    let (hi, lo, n) = range.resolved();
    schedule(input, (hi, lo, n), min_points, needs_decade)
}

fn schedule(input: &Input, base: (f64, f64, usize), min_points: usize, needs_decade: bool) -> Result<Vec<f64>, Failure> {
    let hi = input.g_max.unwrap_or(base.0);
    let lo = input.g_min.unwrap_or(base.1);
    let n = input.points.unwrap_or(base.2);
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi > lo) {
        return Err(Failure::input(format!("need 0 < g-min < g-max, got g-min = {lo}, g-max = {hi}")));
    }
    if n < min_points {
        return Err(Failure::input(format!("need at least {min_points} points, got {n}")));
    }
    if needs_decade && hi / lo < 10.0 * (1.0 - 1e-9) {
        return Err(Failure::input("order fits need g-max / g-min of at least 10"));
    }
    geometric_schedule(hi, lo, n).map_err(|e| Failure::input(e.to_string()))
}

/// Bounds and length of an explicit schedule, for applying overrides to it.
fn span(schedule: &[f64]) -> (f64, f64, usize) {
    (schedule[0], schedule[schedule.len() - 1], schedule.len())
}

fn weakvalue(scn: &Scenario, input: &Input, name: Option<&str>) -> Result<Table, Failure> {
    let (name, op) = observable(scn, name)?;
    let sel = selection(scn)?;
    let schedule = match input.overrides_range() {
        true => schedule(input, span(&scn.weak_schedule()), 4, false)?,
        false => scn.weak_schedule(),
    };
    let analytic = WeakValueEstimate::analytic(sel, op).map_err(runtime)?;
    let numeric = estimate_weak_value(sel, op, scn.pointer(), &schedule).map_err(runtime)?;
    let mut table = Table::new(&["observable", "method", "weak_value", "extrapolation_residual"]);
    for estimate in [analytic, numeric] {
        table.push(vec![
            name.into(),
            estimate.method.name().into(),
            estimate.value.into(),
            estimate.extrapolation_residual.into(),
        ]);
    }
    Ok(table)
}

fn sweep(scn: &Scenario, input: &Input, name: Option<&str>, metric: Metric) -> Result<Table, Failure> {
    let (_, op) = observable(scn, name)?;
    let sel = selection(scn)?;
    let schedule = g_range(scn, input, 4, true)?;
    let probe = Probe::new(sel.pre(), op, scn.pointer()).map_err(runtime)?;
    let result = probe.sweep(metric, &schedule).map_err(runtime)?;
    let mut table = Table::new(&["metric", "g", "value", "fitted_order", "fitted_coefficient"]);
    for (g, value) in result.g_values.iter().zip(&result.metric_values) {
        table.push(vec![
            metric.name().into(),
            (*g).into(),
            (*value).into(),
            result.fitted_order().into(),
            result.fitted_coefficient().into(),
        ]);
    }
    Ok(table)
}

fn arms(scn: &Scenario, net: &OpticalNetwork, given: Option<&[String]>) -> Result<Vec<String>, Failure> {
    let mut arms = given.map(<[String]>::to_vec).unwrap_or_else(|| scn.arms());
    if arms.is_empty() {
        return Err(Failure::input("network has no labelled arms"));
    }
    if let Some(bad) = arms.iter().find(|a| net.locate(a).is_err()) {
        return Err(Failure::input(format!("network has no arm `{bad}`")));
    }
    arms.sort();
    arms.dedup();
    Ok(arms)
}

fn trace(scn: &Scenario, input: &Input, given: Option<&[String]>) -> Result<Table, Failure> {
    let net = network(scn)?;
    let arms = arms(scn, net, given)?;
    let schedule = g_range(scn, input, 2, false)?;
    let refs: Vec<&str> = arms.iter().map(String::as_str).collect();
    let rows = trace_table(net, &refs, scn.pointer(), &schedule).map_err(runtime)?;
    let mut table = Table::new(&["arm", "g", "trace"]);
    for (arm, traces) in rows {
        for (g, t) in schedule.iter().zip(traces) {
            table.push(vec![arm.as_str().into(), (*g).into(), t.into()]);
        }
    }
    Ok(table)
}

fn presence(scn: &Scenario, input: &Input, given: Option<&[String]>) -> Result<Table, Failure> {
    let net = network(scn)?;
    let arms = arms(scn, net, given)?;
    let schedule = g_range(scn, input, 4, true)?;
    let refs: Vec<&str> = arms.iter().map(String::as_str).collect();
    let report = classify_presence(net, &refs, scn.pointer(), &schedule).map_err(runtime)?;
    let mut table = Table::new(&["arm", "presence", "order", "coefficient", "fit_residual", "floored", "weak_value"]);
    for arm in &report.arms {
        let w = arm_weak_value(net, &arm.arm).map_err(runtime)?;
        table.push(vec![
            arm.arm.as_str().into(),
            arm.presence.name().into(),
            arm.fit.order.into(),
            arm.fit.coefficient.into(),
            arm.fit.residual.into(),
            arm.fit.floored.into(),
            w.into(),
        ]);
    }
    Ok(table)
}

fn limits(scn: &Scenario, input: &Input, name: Option<&str>) -> Result<Table, Failure> {
    let (_, op) = observable(scn, name)?;
    let sel = selection(scn)?;
    let mut plan = scn.limit_plan().unwrap_or_default();
    if input.overrides_range() {
        plan.g_schedule = schedule(input, span(&plan.g_schedule), 2, false)?;
    }
    let cmp = compare_limits(sel, op, &plan).map_err(runtime)?;
    let mut table = Table::new(&["route", "parameter", "estimate", "deviation"]);
    table.push(vec!["analytic".into(), Cell::Empty, cmp.analytic.into(), 0.0.into()]);
    for (route, points) in [("g", &cmp.coupling_route), ("spread", &cmp.spread_route)] {
        for p in points {
            table.push(vec![route.into(), p.parameter.into(), p.estimate.into(), p.deviation.into()]);
        }
    }
    Ok(table)
}
