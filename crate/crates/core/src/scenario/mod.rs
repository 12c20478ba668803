//! Plain-text scenario files.
//!
//! ```text
//! tsvf-scenario v1
//! # comment
//! [system]
//! dim = 2
//!
//! [state up_x]
//! amps = 1, 1
//! normalize = true
//!
//! [state up_z]
//! amps = 1, 0
//!
//! [operator sz]
//! expr = pauli_z
//!
//! [pointer]
//! model = gaussian
//! spread = 2
//!
//! [selection]
//! pre = up_x
//! post = up_z
//!
//! [experiment]
//! kind = weakvalue
//! observable = sz
//! ```
//!
//! Operators are given either as `expr = ...` (see the builtins in `expr`) or
//! as `matrix = a, b; c, d` with complex literals. Networks are either
//! `preset = nested_mzi` or spelled out with `modes`, `source`, repeated
//! `element = bs <i> <j> <t>` / `element = phase <mode> <radians>` lines,
//! `slice = A:0, B:1` lines (the slice sits after the elements listed above
//! it), `detector = D1:0` lines and `postselect = D1`.
//!
//! [`parse`] checks syntax, names and dimensions and never returns a partial
//! document. [`validate_semantics`] then checks physics-level requirements and
//! builds the runtime objects.

mod corpus;
mod expr;
mod text;
mod validate;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::interferometer::{Detector, Element, Slice};
use crate::limits::Metric;
use crate::pointer::PauliAxis;
use crate::qcore::LinearOperator;

pub use corpus::{corpus, corpus_entry, CORPUS_NAMES};
pub use text::{format_complex, format_real, parse_complex, Diagnostic, Position, Severity, Spanned};
pub use validate::{validate_semantics, Scenario};

/// Version line every scenario file starts with.
pub const HEADER: &str = "tsvf-scenario v1";

pub const MAX_SYSTEM_DIM: usize = 16;
pub const MAX_MODES: usize = 64;
pub const MAX_POINTER_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum PointerSpec {
    Gaussian { spread: f64, points: Option<usize>, half_width: Option<f64> },
    Qubit { axis: Option<PauliAxis> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionSpec {
    pub pre: String,
    pub post: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkPreset {
    NestedMzi,
}

impl NetworkPreset {
    pub fn name(self) -> &'static str {
        match self {
            NetworkPreset::NestedMzi => "nested_mzi",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDescription {
    pub modes: usize,
    pub source: usize,
    pub elements: Vec<Element>,
    pub slices: Vec<Slice>,
    pub detectors: Vec<Detector>,
    pub postselect: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkSpec {
    Preset(NetworkPreset),
    Custom(NetworkDescription),
}

/// `g` range shared by sweep-like plans; unset values take the defaults
/// `1e-2`, `1e-4` and 9 points.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GRange {
    pub g_max: Option<f64>,
    pub g_min: Option<f64>,
    pub points: Option<usize>,
}

impl GRange {
    pub fn resolved(&self) -> (f64, f64, usize) {
        (self.g_max.unwrap_or(1e-2), self.g_min.unwrap_or(1e-4), self.points.unwrap_or(9))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentPlan {
    WeakValue { observable: String, schedule: Option<Vec<f64>> },
    Sweep { observable: String, metric: Metric, range: GRange },
    Trace { arms: Option<Vec<String>>, range: GRange },
    Presence { arms: Option<Vec<String>>, range: GRange },
    CompareLimits {
        observable: String,
        fixed_spread: Option<f64>,
        g_schedule: Option<Vec<f64>>,
        fixed_g: Option<f64>,
        spreads: Option<Vec<f64>>,
    },
}

impl ExperimentPlan {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentPlan::WeakValue { .. } => "weakvalue",
            ExperimentPlan::Sweep { .. } => "sweep",
            ExperimentPlan::Trace { .. } => "trace",
            ExperimentPlan::Presence { .. } => "presence",
            ExperimentPlan::CompareLimits { .. } => "compare_limits",
        }
    }

    pub fn observable(&self) -> Option<&str> {
        match self {
            ExperimentPlan::WeakValue { observable, .. }
            | ExperimentPlan::Sweep { observable, .. }
            | ExperimentPlan::CompareLimits { observable, .. } => Some(observable),
            _ => None,
        }
    }
}

/// Where things were declared. Positions never take part in comparisons, so
/// documents built from different texts compare by content alone.
#[derive(Debug, Clone, Default)]
pub struct SourceMap(BTreeMap<String, Position>);

impl SourceMap {
    fn insert(&mut self, key: impl Into<String>, pos: Position) {
        self.0.entry(key.into()).or_insert(pos);
    }

    /// Position recorded for `key`, or the start of the file.
    pub fn get(&self, key: &str) -> Position {
        self.0.get(key).copied().unwrap_or(Position::new(1, 1))
    }
}

impl PartialEq for SourceMap {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDoc {
    /// System dimension; absent for network-only scenarios.
    pub dim: Option<usize>,
    /// Amplitudes as written (or normalized, with `normalize = true`).
    pub states: BTreeMap<String, Vec<Complex64>>,
    /// Evaluated operators, in declaration order.
    pub operators: Vec<(String, LinearOperator)>,
    pub pointer: Option<PointerSpec>,
    pub selection: Option<SelectionSpec>,
    pub network: Option<NetworkSpec>,
    pub experiment: ExperimentPlan,
    pub source: SourceMap,
}

impl ScenarioDoc {
    pub fn operator(&self, name: &str) -> Option<&LinearOperator> {
        self.operators.iter().find(|(n, _)| n == name).map(|(_, op)| op)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    System,
    State,
    Operator,
    Pointer,
    Selection,
    Network,
    Experiment,
}

impl Kind {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "system" => Kind::System,
            "state" => Kind::State,
            "operator" => Kind::Operator,
            "pointer" => Kind::Pointer,
            "selection" => Kind::Selection,
            "network" => Kind::Network,
            "experiment" => Kind::Experiment,
            _ => return None,
        })
    }

    fn named(self) -> bool {
        matches!(self, Kind::State | Kind::Operator)
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::System => &["dim"],
            Kind::State => &["amps", "normalize"],
            Kind::Operator => &["expr", "matrix"],
            Kind::Pointer => &["model", "spread", "points", "half_width", "axis"],
            Kind::Selection => &["pre", "post"],
            Kind::Network => &["preset", "modes", "source", "element", "slice", "detector", "postselect"],
            Kind::Experiment => &[
                "kind",
                "observable",
                "schedule",
                "metric",
                "g_max",
                "g_min",
                "points",
                "arms",
                "fixed_spread",
                "g_schedule",
                "fixed_g",
                "spreads",
            ],
        }
    }

    fn repeatable(self, key: &str) -> bool {
        self == Kind::Network && matches!(key, "element" | "slice" | "detector")
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: Spanned,
    value: Spanned,
}

#[derive(Debug, Clone)]
struct Section {
    kind: Kind,
    name: Option<Spanned>,
    header: Position,
    entries: Vec<Entry>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&Spanned> {
        self.entries.iter().find(|e| e.key.text == key).map(|e| &e.value)
    }

    fn require(&self, key: &str) -> Result<&Spanned, Diagnostic> {
        self.get(key).ok_or_else(|| Diagnostic::error(self.header, format!("missing key `{key}`")))
    }
}

/// Collects diagnostics; `check` turns a `Result` into an `Option`.
#[derive(Default)]
struct Sink(Vec<Diagnostic>);

impl Sink {
    fn check<T>(&mut self, result: Result<T, Diagnostic>) -> Option<T> {
        match result {
            Ok(v) => Some(v),
            Err(d) => {
                self.0.push(d);
                None
            }
        }
    }
}

/// Splits the text into sections; reports header, key and layout errors.
fn sections(text: &str, sink: &mut Sink) -> Vec<Section> {
    let mut out: Vec<Section> = Vec::new();
    let mut lines = text.split('\n').enumerate();
    match lines.next() {
        Some((_, first)) if first.trim_end() == HEADER => {}
        _ => {
            sink.0.push(Diagnostic::error(Position::new(1, 1), format!("first line must be `{HEADER}`")));
            return out;
        }
    }
    for (index, raw) in lines {
        let line = Spanned::new(raw, Position::new(index + 1, 1));
        let content = match raw.find('#') {
            Some(cut) => line.slice(0, cut),
            None => line.trimmed(),
        };
        if content.text.is_empty() {
            continue;
        }
        if content.text.starts_with('[') {
            if let Some(section) = sink.check(header(&content)) {
                let duplicate = out.iter().find(|s| {
                    s.kind == section.kind
                        && (!section.kind.named() || s.name.as_ref().map(|n| &n.text) == section.name.as_ref().map(|n| &n.text))
                });
                if let Some(previous) = duplicate {
                    let what = section.name.as_ref().unwrap_or(&content);
                    sink.0.push(what.error(format!(
                        "duplicate section (first declared on line {})",
                        previous.header.line
                    )));
                }
                out.push(section);
            }
            continue;
        }
        let Some(eq) = content.text.find('=') else {
            sink.0.push(content.error("expected `key = value` or a `[section]` header"));
            continue;
        };
        let key = content.slice(0, eq);
        let value = content.slice(eq + 1, content.text.len());
        let Some(section) = out.last_mut() else {
            sink.0.push(key.error("assignment outside of any section"));
            continue;
        };
        if !section.kind.keys().contains(&key.text.as_str()) {
            sink.0.push(key.error(format!("unknown key `{}`", key.text)));
            continue;
        }
        if value.text.is_empty() {
            sink.0.push(Diagnostic::error(value.pos, format!("key `{}` has no value", key.text)));
            continue;
        }
        if !section.kind.repeatable(&key.text) && section.get(&key.text).is_some() {
            sink.0.push(key.error(format!("duplicate key `{}`", key.text)));
            continue;
        }
        section.entries.push(Entry { key, value });
    }
    out
}

fn header(content: &Spanned) -> Result<Section, Diagnostic> {
    let text = &content.text;
    if !text.ends_with(']') {
        return Err(content.error("section header is missing `]`"));
    }
    let inner = content.slice(1, text.len() - 1);
    let words = inner.words();
    let Some(kind_word) = words.first() else {
        return Err(content.error("empty section header"));
    };
    let kind = Kind::from_name(&kind_word.text)
        .ok_or_else(|| kind_word.error(format!("unknown section `{}`", kind_word.text)))?;
    let name = words.get(1).cloned();
    if let Some(extra) = words.get(2) {
        return Err(extra.error("unexpected text in section header"));
    }
    match (&name, kind.named()) {
        (None, true) => Err(kind_word.error(format!("section `{}` needs a name", kind_word.text))),
        (Some(n), false) => Err(n.error(format!("section `{}` takes no name", kind_word.text))),
        (Some(n), true) if !text::is_identifier(&n.text) => Err(n.error(format!("invalid name `{}`", n.text))),
        _ => Ok(Section { kind, name, header: content.pos, entries: Vec::new() }),
    }
}

fn parse_reals(value: &Spanned) -> Result<Vec<f64>, Diagnostic> {
    value.list()?.iter().map(text::parse_real).collect()
}

fn parse_names(value: &Spanned) -> Result<Vec<Spanned>, Diagnostic> {
    let items = value.list()?;
    match items.iter().find(|i| !text::is_identifier(&i.text)) {
        Some(bad) => Err(bad.error(format!("invalid name `{}`", bad.text))),
        None => Ok(items),
    }
}

fn bounded(token: &Spanned, low: usize, high: usize, what: &str) -> Result<usize, Diagnostic> {
    let n = text::parse_usize(token)?;
    if n < low || n > high {
        return Err(token.error(format!("{what} must be between {low} and {high}, got {n}")));
    }
    Ok(n)
}

/// Parses a scenario, or returns every error found.
pub fn parse(text: &str) -> Result<ScenarioDoc, Vec<Diagnostic>> {
    let mut sink = Sink::default();
    let all = sections(text, &mut sink);
    if !sink.0.is_empty() {
        return Err(sink.0);
    }
    let doc = build(&all, &mut sink);
    match doc {
        Some(doc) if sink.0.is_empty() => Ok(doc),
        _ => {
            if sink.0.is_empty() {
                sink.0.push(Diagnostic::error(Position::new(1, 1), "incomplete scenario"));
            }
            sink.0.sort_by_key(|d| d.position);
            Err(sink.0)
        }
    }
}

fn build(all: &[Section], sink: &mut Sink) -> Option<ScenarioDoc> {
    let mut source = SourceMap::default();
    let find = |kind: Kind| all.iter().find(|s| s.kind == kind);
    let top = Position::new(1, 1);

    let dim = match find(Kind::System) {
        Some(system) => {
            source.insert("system", system.header);
            sink.check(system.require("dim").and_then(|d| bounded(d, 1, MAX_SYSTEM_DIM, "system dimension")))
        }
        None => {
            if let Some(s) = all.iter().find(|s| s.kind.named() || s.kind == Kind::Selection) {
                sink.0.push(Diagnostic::error(s.header, "states, operators and selections need a [system] section"));
            }
            None
        }
    };
    let system_ok = find(Kind::System).is_none() || dim.is_some();

    let mut states = BTreeMap::new();
    for section in all.iter().filter(|s| s.kind == Kind::State) {
        let name = section.name.as_ref().expect("named section");
        source.insert(format!("state {}", name.text), name.pos);
        if let Some(amps) = sink.check(state(section, dim)) {
            states.insert(name.text.clone(), amps);
        }
    }

    let mut operators: Vec<(String, LinearOperator)> = Vec::new();
    let mut known: BTreeMap<String, LinearOperator> = BTreeMap::new();
    for section in all.iter().filter(|s| s.kind == Kind::Operator) {
        let name = section.name.as_ref().expect("named section");
        source.insert(format!("operator {}", name.text), name.pos);
        let env = expr::Env { states: &states, operators: &known };
        if let Some(op) = sink.check(operator(section, dim, &env)) {
            known.insert(name.text.clone(), op.clone());
            operators.push((name.text.clone(), op));
        }
    }

    let pointer = find(Kind::Pointer).and_then(|section| {
        source.insert("pointer", section.header);
        sink.check(pointer(section))
    });
    let pointer_ok = find(Kind::Pointer).is_none() || pointer.is_some();

    let selection = find(Kind::Selection).and_then(|section| {
        let mut resolve = |key: &str| -> Option<String> {
            let token = sink.check(section.require(key))?;
            source.insert(format!("selection.{key}"), token.pos);
            if !states.contains_key(&token.text) {
                sink.0.push(token.error(format!("unknown state `{}`", token.text)));
                return None;
            }
            Some(token.text.clone())
        };
        let pre = resolve("pre");
        let post = resolve("post");
        Some(SelectionSpec { pre: pre?, post: post? })
    });
    let selection_ok = find(Kind::Selection).is_none() || selection.is_some();

    let network = find(Kind::Network).and_then(|section| {
        source.insert("network", section.header);
        sink.check(network(section))
    });
    let network_ok = find(Kind::Network).is_none() || network.is_some();

    let experiment = match find(Kind::Experiment) {
        Some(section) => {
            source.insert("experiment", section.header);
            for entry in &section.entries {
                source.insert(format!("experiment.{}", entry.key.text), entry.value.pos);
            }
            sink.check(experiment(section, &known))
        }
        None => {
            sink.0.push(Diagnostic::error(top, "missing [experiment] section"));
            None
        }
    };

    if !(system_ok && pointer_ok && selection_ok && network_ok) {
        return None;
    }
    Some(ScenarioDoc {
        dim,
        states,
        operators,
        pointer,
        selection,
        network,
        experiment: experiment?,
        source,
    })
}

fn state(section: &Section, dim: Option<usize>) -> Result<Vec<Complex64>, Diagnostic> {
    let amps_token = section.require("amps")?;
    let amps = amps_token.list()?.iter().map(text::parse_complex).collect::<Result<Vec<_>, _>>()?;
    if let Some(dim) = dim {
        if amps.len() != dim {
            return Err(amps_token.error(format!("dimension mismatch: expected {dim} amplitudes, got {}", amps.len())));
        }
    }
    let normalize = section.get("normalize").map(text::parse_bool).transpose()?.unwrap_or(false);
    if !normalize {
        return Ok(amps);
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(amps_token.error("cannot normalize a zero or overflowing state"));
    }
    Ok(amps.into_iter().map(|a| a / norm).collect())
}

fn operator(section: &Section, dim: Option<usize>, env: &expr::Env<'_>) -> Result<LinearOperator, Diagnostic> {
    let (op, at) = match (section.get("expr"), section.get("matrix")) {
        (Some(e), None) => (expr::evaluate(e, env)?, e),
        (None, Some(m)) => {
            let rows = m
                .split(';')
                .iter()
                .map(|row| row.list()?.iter().map(text::parse_complex).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let op = LinearOperator::from_rows(&rows).map_err(|e| m.error(format!("invalid matrix: {e}")))?;
            (op, m)
        }
        (Some(_), Some(m)) => return Err(m.error("give either `expr` or `matrix`, not both")),
        (None, None) => return Err(Diagnostic::error(section.header, "missing key `expr` or `matrix`")),
    };
    match dim {
        Some(dim) if op.dim() != dim => {
            Err(at.error(format!("dimension mismatch: operator is {0}x{0}, system has dim {dim}", op.dim())))
        }
        _ => Ok(op),
    }
}

fn pointer(section: &Section) -> Result<PointerSpec, Diagnostic> {
    let model = section.require("model")?;
    let reject = |keys: &[&str]| -> Result<(), Diagnostic> {
        match keys.iter().find_map(|k| section.entries.iter().find(|e| e.key.text == *k)) {
            Some(e) => Err(e.key.error(format!("key `{}` does not apply to a {} pointer", e.key.text, model.text))),
            None => Ok(()),
        }
    };
    match model.text.as_str() {
        "gaussian" => {
            reject(&["axis"])?;
            let spread = text::parse_real(section.require("spread")?)?;
            let points = section.get("points").map(|p| bounded(p, 1, MAX_POINTER_POINTS, "points")).transpose()?;
            let half_width = section.get("half_width").map(text::parse_real).transpose()?;
            Ok(PointerSpec::Gaussian { spread, points, half_width })
        }
        "qubit" => {
            reject(&["spread", "points", "half_width"])?;
            let axis = section
                .get("axis")
                .map(|a| match a.text.as_str() {
                    "x" => Ok(PauliAxis::X),
                    "y" => Ok(PauliAxis::Y),
                    "z" => Ok(PauliAxis::Z),
                    other => Err(a.error(format!("unknown axis `{other}` (use x, y or z)"))),
                })
                .transpose()?;
            Ok(PointerSpec::Qubit { axis })
        }
        other => Err(model.error(format!("unknown pointer model `{other}` (use gaussian or qubit)"))),
    }
}

fn labelled(token: &Spanned) -> Result<(String, usize), Diagnostic> {
    let Some(colon) = token.text.find(':') else {
        return Err(token.error(format!("expected `label:mode`, got `{}`", token.text)));
    };
    let label = token.slice(0, colon);
    let mode = token.slice(colon + 1, token.text.len());
    if !text::is_identifier(&label.text) {
        return Err(label.error(format!("invalid label `{}`", label.text)));
    }
    Ok((label.text, bounded(&mode, 0, MAX_MODES - 1, "mode")?))
}

fn network(section: &Section) -> Result<NetworkSpec, Diagnostic> {
    if let Some(preset) = section.get("preset") {
        if let Some(extra) = section.entries.iter().find(|e| e.key.text != "preset") {
            return Err(extra.key.error("a preset network takes no other keys"));
        }
        return match preset.text.as_str() {
            "nested_mzi" => Ok(NetworkSpec::Preset(NetworkPreset::NestedMzi)),
            other => Err(preset.error(format!("unknown network preset `{other}`"))),
        };
    }
    let modes = bounded(section.require("modes")?, 1, MAX_MODES, "modes")?;
    let source = bounded(section.require("source")?, 0, modes - 1, "source mode")?;
    let postselect = section.require("postselect")?;
    if !text::is_identifier(&postselect.text) {
        return Err(postselect.error(format!("invalid detector label `{}`", postselect.text)));
    }
    let mut elements = Vec::new();
    let mut slices = Vec::new();
    let mut detectors = Vec::new();
    for entry in &section.entries {
        match entry.key.text.as_str() {
            "element" => elements.push(element(&entry.value, modes)?),
            "slice" => {
                let arms = entry.value.list()?.iter().map(labelled).collect::<Result<Vec<_>, _>>()?;
                slices.push(Slice { position: elements.len(), arms });
            }
            "detector" => {
                let (label, mode) = labelled(&entry.value)?;
                detectors.push(Detector { label, mode });
            }
            _ => {}
        }
    }
    Ok(NetworkSpec::Custom(NetworkDescription {
        modes,
        source,
        elements,
        slices,
        detectors,
        postselect: postselect.text.clone(),
    }))
}

fn element(value: &Spanned, modes: usize) -> Result<Element, Diagnostic> {
    let words = value.words();
    let mode = |w: &Spanned| bounded(w, 0, modes - 1, "mode");
    match (words[0].text.as_str(), words.len()) {
        ("bs", 4) => {
            let t = text::parse_real(&words[3])?;
            if !(t > 0.0 && t < 1.0) {
                return Err(words[3].error(format!("transmissivity must lie in (0, 1), got {t}")));
            }
            let (first, second) = (mode(&words[1])?, mode(&words[2])?);
            if first == second {
                return Err(words[2].error("a beam splitter needs two different modes"));
            }
            Ok(Element::beam_splitter(first, second, t))
        }
        ("phase", 3) => Ok(Element::phase_shift(mode(&words[1])?, text::parse_real(&words[2])?)),
        ("bs", _) => Err(value.error("expected `bs <mode> <mode> <transmissivity>`")),
        ("phase", _) => Err(value.error("expected `phase <mode> <radians>`")),
        (other, _) => Err(words[0].error(format!("unknown element `{other}` (use bs or phase)"))),
    }
}

fn experiment(section: &Section, operators: &BTreeMap<String, LinearOperator>) -> Result<ExperimentPlan, Diagnostic> {
    let kind = section.require("kind")?;
    let allowed: &[&str] = match kind.text.as_str() {
        "weakvalue" => &["observable", "schedule"],
        "sweep" => &["observable", "metric", "g_max", "g_min", "points"],
        "trace" | "presence" => &["arms", "g_max", "g_min", "points"],
        "compare_limits" => &["observable", "fixed_spread", "g_schedule", "fixed_g", "spreads"],
        other => {
            return Err(kind.error(format!(
                "unknown experiment kind `{other}` (use weakvalue, sweep, trace, presence or compare_limits)"
            )))
        }
    };
    if let Some(e) = section.entries.iter().find(|e| e.key.text != "kind" && !allowed.contains(&e.key.text.as_str())) {
        return Err(e.key.error(format!("key `{}` does not apply to experiment kind `{}`", e.key.text, kind.text)));
    }
    let observable = || -> Result<String, Diagnostic> {
        let token = section.require("observable")?;
        if !operators.contains_key(&token.text) {
            return Err(token.error(format!("unknown operator `{}`", token.text)));
        }
        Ok(token.text.clone())
    };
    let reals = |key: &str| section.get(key).map(parse_reals).transpose();
    let real = |key: &str| section.get(key).map(text::parse_real).transpose();
    let range = || -> Result<GRange, Diagnostic> {
        Ok(GRange {
            g_max: real("g_max")?,
            g_min: real("g_min")?,
            points: section.get("points").map(|p| bounded(p, 1, 1000, "points")).transpose()?,
        })
    };
    let arms = || -> Result<Option<Vec<String>>, Diagnostic> {
        section.get("arms").map(|a| Ok(parse_names(a)?.into_iter().map(|s| s.text).collect())).transpose()
    };
    Ok(match kind.text.as_str() {
        "weakvalue" => ExperimentPlan::WeakValue { observable: observable()?, schedule: reals("schedule")? },
        "sweep" => {
            let token = section.require("metric")?;
            let metric = Metric::from_name(&token.text).ok_or_else(|| {
                token.error(format!(
                    "unknown metric `{}` (use continuity, derail, first_order_residual or overlap_deficit)",
                    token.text
                ))
            })?;
            ExperimentPlan::Sweep { observable: observable()?, metric, range: range()? }
        }
        "trace" => ExperimentPlan::Trace { arms: arms()?, range: range()? },
        "presence" => ExperimentPlan::Presence { arms: arms()?, range: range()? },
        _ => ExperimentPlan::CompareLimits {
            observable: observable()?,
            fixed_spread: real("fixed_spread")?,
            g_schedule: reals("g_schedule")?,
            fixed_g: real("fixed_g")?,
            spreads: reals("spreads")?,
        },
    })
}

fn join_reals(values: &[f64]) -> String {
    values.iter().map(|v| format_real(*v)).collect::<Vec<_>>().join(", ")
}

/// Canonical text for a document; [`parse`] reads it back to an equal document.
pub fn serialize(doc: &ScenarioDoc) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    if let Some(dim) = doc.dim {
        let _ = writeln!(out, "\n[system]\ndim = {dim}");
    }
    for (name, amps) in &doc.states {
        let amps: Vec<String> = amps.iter().map(|a| format_complex(*a)).collect();
        let _ = writeln!(out, "\n[state {name}]\namps = {}", amps.join(", "));
    }
    for (name, op) in &doc.operators {
        let rows: Vec<String> = (0..op.dim())
            .map(|i| (0..op.dim()).map(|j| format_complex(op.entry(i, j))).collect::<Vec<_>>().join(", "))
            .collect();
        let _ = writeln!(out, "\n[operator {name}]\nmatrix = {}", rows.join("; "));
    }
    match &doc.pointer {
        Some(PointerSpec::Gaussian { spread, points, half_width }) => {
            let _ = writeln!(out, "\n[pointer]\nmodel = gaussian\nspread = {}", format_real(*spread));
            if let Some(p) = points {
                let _ = writeln!(out, "points = {p}");
            }
            if let Some(h) = half_width {
                let _ = writeln!(out, "half_width = {}", format_real(*h));
            }
        }
        Some(PointerSpec::Qubit { axis }) => {
            let _ = writeln!(out, "\n[pointer]\nmodel = qubit");
            if let Some(a) = axis {
                let _ = writeln!(out, "axis = {}", a.letter());
            }
        }
        None => {}
    }
    if let Some(sel) = &doc.selection {
        let _ = writeln!(out, "\n[selection]\npre = {}\npost = {}", sel.pre, sel.post);
    }
    match &doc.network {
        Some(NetworkSpec::Preset(p)) => {
            let _ = writeln!(out, "\n[network]\npreset = {}", p.name());
        }
        Some(NetworkSpec::Custom(net)) => {
            let _ = writeln!(out, "\n[network]\nmodes = {}\nsource = {}", net.modes, net.source);
            let slice_line = |s: &Slice| {
                let arms: Vec<String> = s.arms.iter().map(|(l, m)| format!("{l}:{m}")).collect();
                format!("slice = {}", arms.join(", "))
            };
            for (k, e) in net.elements.iter().enumerate() {
                for s in net.slices.iter().filter(|s| s.position == k) {
                    let _ = writeln!(out, "{}", slice_line(s));
                }
                let _ = match *e {
                    Element::BeamSplitter { first, second, transmissivity } => {
                        writeln!(out, "element = bs {first} {second} {}", format_real(transmissivity))
                    }
                    Element::PhaseShift { mode, phase } => writeln!(out, "element = phase {mode} {}", format_real(phase)),
                };
            }
            for s in net.slices.iter().filter(|s| s.position == net.elements.len()) {
                let _ = writeln!(out, "{}", slice_line(s));
            }
            for d in &net.detectors {
                let _ = writeln!(out, "detector = {}:{}", d.label, d.mode);
            }
            let _ = writeln!(out, "postselect = {}", net.postselect);
        }
        None => {}
    }
    let _ = writeln!(out, "\n[experiment]\nkind = {}", doc.experiment.kind());
    let mut put = |key: &str, value: Option<String>| {
        if let Some(v) = value {
            let _ = writeln!(out, "{key} = {v}");
        }
    };
    let range = |r: &GRange, put: &mut dyn FnMut(&str, Option<String>)| {
        put("g_max", r.g_max.map(format_real));
        put("g_min", r.g_min.map(format_real));
        put("points", r.points.map(|p| p.to_string()));
    };
    match &doc.experiment {
        ExperimentPlan::WeakValue { observable, schedule } => {
            put("observable", Some(observable.clone()));
            put("schedule", schedule.as_deref().map(join_reals));
        }
        ExperimentPlan::Sweep { observable, metric, range: r } => {
            put("observable", Some(observable.clone()));
            put("metric", Some(metric.name().to_string()));
            range(r, &mut put);
        }
        ExperimentPlan::Trace { arms, range: r } | ExperimentPlan::Presence { arms, range: r } => {
            put("arms", arms.as_ref().map(|a| a.join(", ")));
            range(r, &mut put);
        }
        ExperimentPlan::CompareLimits { observable, fixed_spread, g_schedule, fixed_g, spreads } => {
            put("observable", Some(observable.clone()));
            put("fixed_spread", fixed_spread.map(format_real));
            put("g_schedule", g_schedule.as_deref().map(join_reals));
            put("fixed_g", fixed_g.map(format_real));
            put("spreads", spreads.as_deref().map(join_reals));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "tsvf-scenario v1
[system]
dim = 2
[state up_x]
amps = 0.7071067811865476, 0.7071067811865476
[state up_z]
amps = 1, 0
[operator sz]
expr = pauli_z
[selection]
pre = up_x
post = up_z
[experiment]
kind = weakvalue
observable = sz
";

    fn first_error(text: &str) -> Diagnostic {
        parse(text).unwrap_err().into_iter().next().unwrap()
    }

    #[test]
    fn minimal_spin_scenario() {
        let doc = parse(MINIMAL).unwrap();
        assert_eq!(doc.dim, Some(2));
        assert_eq!(doc.states.len(), 2);
        assert_eq!(doc.operator("sz"), Some(&LinearOperator::pauli_z()));
        assert_eq!(doc.selection, Some(SelectionSpec { pre: "up_x".into(), post: "up_z".into() }));
        assert_eq!(doc.experiment, ExperimentPlan::WeakValue { observable: "sz".into(), schedule: None });
        assert!(doc.pointer.is_none());
    }

    #[test]
    fn malformed_literal_position() {
        let text = MINIMAL.replace("amps = 1, 0", "amps = 1, 0.5+");
        let err = first_error(&text);
        assert_eq!(err.position, Position::new(7, 11));
        assert!(err.message.contains("malformed complex literal"), "{}", err.message);
    }

    #[test]
    fn header_is_required() {
        assert_eq!(first_error("[system]\ndim = 2\n").position, Position::new(1, 1));
        let orphan = MINIMAL.replace("[system]\ndim = 2\n", "");
        assert_eq!(first_error(&orphan).position, Position::new(2, 1));
        assert!(parse("").is_err());
    }

    #[test]
    fn layout_errors() {
        let dup = MINIMAL.replace("[selection]", "[state up_z]\namps = 0, 1\n[selection]");
        let err = first_error(&dup);
        assert!(err.message.contains("duplicate section"));
        assert_eq!(err.position, Position::new(10, 8));

        let unknown = MINIMAL.replace("observable = sz", "observable = sx");
        let err = first_error(&unknown);
        assert_eq!(err.position, Position::new(15, 14));

        let mismatch = MINIMAL.replace("amps = 1, 0", "amps = 1, 0, 0");
        assert_eq!(first_error(&mismatch).position, Position::new(7, 8));

        let bad_key = MINIMAL.replace("dim = 2", "dimension = 2");
        assert_eq!(first_error(&bad_key).position, Position::new(3, 1));
    }

    #[test]
    fn comments_and_whitespace_are_ignored() {
        let text = MINIMAL.replace("[system]", "# spin example\n  [system]   # the qubit").replace("= 1, 0", "=   1 ,0   ");
        assert_eq!(parse(&text).unwrap(), parse(MINIMAL).unwrap());
    }

    #[test]
    fn serialize_round_trip() {
        let doc = parse(MINIMAL).unwrap();
        let text = serialize(&doc);
        assert_eq!(parse(&text).unwrap(), doc);
    }

    #[test]
    fn custom_network_round_trip() {
        let text = "tsvf-scenario v1
[network]
modes = 2
source = 0
slice = S:0
element = bs 0 1 0.5
slice = U:0, L:1
element = phase 1 0.25
element = bs 0 1 0.5
detector = D1:0
detector = D2:1
postselect = D1
[experiment]
kind = presence
arms = U, L
";
        let doc = parse(text).unwrap();
        let Some(NetworkSpec::Custom(net)) = &doc.network else { panic!("custom network expected") };
        assert_eq!(net.slices.iter().map(|s| s.position).collect::<Vec<_>>(), [0, 1]);
        assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
    }
}
