//! Single-particle optical networks and the weak traces left in their arms.
//!
//! A network state is one complex amplitude per mode. Elements act on one or
//! two modes; the beam splitter convention is
//!
//! ```text
//! | a_i |    | sqrt(t)      i sqrt(1-t) | | a_i |
//! | a_j | -> | i sqrt(1-t)  sqrt(t)     | | a_j |
//! ```
//!
//! so the transmitted amplitude stays in its mode and the reflected one picks
//! up a factor `i`. Slices mark points between elements and label the modes
//! there as arms. An arm label may recur in later slices (an outer arm that
//! no element touches); arm operations use its first occurrence.
//!
//! Weak traces are computed with a pointer on every labelled arm at once, each
//! coupled through `exp(-i g Pi_arm (x) P)`. In the single-particle picture
//! every path through the network shifts exactly the pointers of the arms it
//! visits, so the post-selected state is a sum over paths with g-independent
//! amplitudes. The trace of arm `X` is the norm of the part of that state
//! attributable to pointer `X` being shifted:
//!
//! ```text
//! trace_X(g) = ||(T(g) - 1)|m>|| * ||chi_X(g)|| / |<out|in>|
//! chi_X(g)   = sum over paths through X of  amp(path) (x)_{k != X} (T|m> if k on path, else |m>)
//! ```
//!
//! As `g -> 0`, `chi_X -> <out|Pi_X|in> |m...m>`, so the trace is first order
//! exactly when the arm's weak value is nonzero. When the weak value vanishes
//! the leading term comes from paths that differ in which other pointers they
//! shift, which is second order. [`TraceCoupling::ProbedArmOnly`] gives the
//! single-pointer variant, where such arms carry no trace at all.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::limits::{classify_order, fit_order, OrderClass, OrderFit};
use crate::pointer::PointerModel;
use crate::qcore::{LinearOperator, StateVector};
use crate::tolerance::{OVERLAP_THRESHOLD, STRUCTURAL};
use crate::weakmeas::validate_schedule;

const MAX_POINTER_ARMS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Element {
    BeamSplitter { first: usize, second: usize, transmissivity: f64 },
    PhaseShift { mode: usize, phase: f64 },
}

impl Element {
    pub fn beam_splitter(first: usize, second: usize, transmissivity: f64) -> Self {
        Self::BeamSplitter { first, second, transmissivity }
    }

    pub fn phase_shift(mode: usize, phase: f64) -> Self {
        Self::PhaseShift { mode, phase }
    }

    /// Modes the element acts on.
    pub fn modes(&self) -> Vec<usize> {
        match *self {
            Self::BeamSplitter { first, second, .. } => vec![first, second],
            Self::PhaseShift { mode, .. } => vec![mode],
        }
    }

    /// The element's 1x1 or 2x2 block.
    pub fn block(&self) -> Vec<Vec<Complex64>> {
        match *self {
            Self::BeamSplitter { transmissivity: t, .. } => {
                let tr = Complex64::new(t.sqrt(), 0.0);
                let rf = Complex64::new(0.0, (1.0 - t).sqrt());
                vec![vec![tr, rf], vec![rf, tr]]
            }
            Self::PhaseShift { phase, .. } => vec![vec![Complex64::from_polar(1.0, phase)]],
        }
    }

    fn validate(&self, n_modes: usize) -> Result<()> {
        let modes = self.modes();
        if let Some(m) = modes.iter().find(|m| **m >= n_modes) {
            return Err(Error::InvalidNetwork(format!("mode {m} out of range ({n_modes} modes)")));
        }
        match *self {
            Self::BeamSplitter { first, second, transmissivity: t } => {
                if first == second {
                    return Err(Error::InvalidNetwork(format!("beam splitter couples mode {first} to itself")));
                }
                if !(t > 0.0 && t < 1.0) {
                    return Err(Error::InvalidNetwork(format!("transmissivity {t} outside (0, 1)")));
                }
            }
            Self::PhaseShift { phase, .. } => {
                if !phase.is_finite() {
                    return Err(Error::InvalidNetwork(format!("non-finite phase {phase}")));
                }
            }
        }
        let block = self.block();
        let deviation = (0..block.len())
            .flat_map(|i| (0..block.len()).map(move |j| (i, j)))
            .map(|(i, j)| {
                let dot: Complex64 = (0..block.len()).map(|k| block[k][i].conj() * block[k][j]).sum();
                (dot - if i == j { 1.0 } else { 0.0 }).norm()
            })
            .fold(0.0, f64::max);
        if deviation > STRUCTURAL {
            return Err(Error::InvalidNetwork(format!("element block not unitary (deviation {deviation:e})")));
        }
        Ok(())
    }

    fn apply(&self, amps: &mut [Complex64]) {
        self.apply_block(amps, false)
    }

    fn apply_adjoint(&self, amps: &mut [Complex64]) {
        self.apply_block(amps, true)
    }

    fn apply_block(&self, amps: &mut [Complex64], adjoint: bool) {
        let block = self.block();
        let entry = |i: usize, j: usize| if adjoint { block[j][i].conj() } else { block[i][j] };
        match *self {
            Self::BeamSplitter { first, second, .. } => {
                let (a, b) = (amps[first], amps[second]);
                amps[first] = entry(0, 0) * a + entry(0, 1) * b;
                amps[second] = entry(1, 0) * a + entry(1, 1) * b;
            }
            Self::PhaseShift { mode, .. } => amps[mode] *= entry(0, 0),
        }
    }
}

/// Arm labels for the modes at one point of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    /// Number of elements applied before this slice.
    pub position: usize,
    pub arms: Vec<(String, usize)>,
}

impl Slice {
    pub fn new(position: usize, arms: &[(&str, usize)]) -> Self {
        Self { position, arms: arms.iter().map(|(l, m)| (l.to_string(), *m)).collect() }
    }

    pub fn mode_of(&self, label: &str) -> Option<usize> {
        self.arms.iter().find(|(l, _)| l == label).map(|(_, m)| *m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Detector {
    pub label: String,
    pub mode: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpticalNetwork {
    n_modes: usize,
    elements: Vec<Element>,
    slices: Vec<Slice>,
    source_mode: usize,
    detectors: Vec<Detector>,
    postselect: String,
}

impl OpticalNetwork {
    pub fn new(
        n_modes: usize,
        elements: Vec<Element>,
        slices: Vec<Slice>,
        source_mode: usize,
        detectors: Vec<Detector>,
        postselect: &str,
    ) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidNetwork("network needs at least one mode".into()));
        }
        if source_mode >= n_modes {
            return Err(Error::InvalidNetwork(format!("source mode {source_mode} out of range")));
        }
        for element in &elements {
            element.validate(n_modes)?;
        }
        for (k, slice) in slices.iter().enumerate() {
            if slice.position > elements.len() {
                return Err(Error::InvalidNetwork(format!(
                    "slice {k} sits after element {} but there are only {}",
                    slice.position,
                    elements.len()
                )));
            }
            if k > 0 && slice.position < slices[k - 1].position {
                return Err(Error::InvalidNetwork(format!("slice {k} is out of order")));
            }
            for (i, (label, mode)) in slice.arms.iter().enumerate() {
                if label.is_empty() {
                    return Err(Error::InvalidNetwork(format!("empty arm label in slice {k}")));
                }
                if *mode >= n_modes {
                    return Err(Error::InvalidNetwork(format!("arm `{label}` uses mode {mode} out of range")));
                }
                if slice.arms[..i].iter().any(|(l, m)| l == label || m == mode) {
                    return Err(Error::InvalidNetwork(format!("arm `{label}` or its mode repeats in slice {k}")));
                }
            }
        }
        for (i, d) in detectors.iter().enumerate() {
            if d.mode >= n_modes {
                return Err(Error::InvalidNetwork(format!("detector `{}` uses mode {} out of range", d.label, d.mode)));
            }
            if detectors[..i].iter().any(|e| e.label == d.label || e.mode == d.mode) {
                return Err(Error::InvalidNetwork(format!("detector `{}` or its mode repeats", d.label)));
            }
        }
        if !detectors.iter().any(|d| d.label == postselect) {
            return Err(Error::InvalidNetwork(format!("post-selection detector `{postselect}` is not declared")));
        }
        Ok(Self { n_modes, elements, slices, source_mode, detectors, postselect: postselect.to_string() })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn source_mode(&self) -> usize {
        self.source_mode
    }

    pub fn detectors(&self) -> &[Detector] {
        &self.detectors
    }

    pub fn postselect(&self) -> &str {
        &self.postselect
    }

    pub fn postselect_mode(&self) -> usize {
        self.detectors.iter().find(|d| d.label == self.postselect).map(|d| d.mode).expect("validated")
    }

    /// Every arm label, sorted.
    pub fn arm_labels(&self) -> Vec<String> {
        let mut labels: Vec<String> = self.slices.iter().flat_map(|s| s.arms.iter().map(|(l, _)| l.clone())).collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Slice index and mode of the first occurrence of `label`.
    pub fn locate(&self, label: &str) -> Result<(usize, usize)> {
        self.slices
            .iter()
            .enumerate()
            .find_map(|(k, s)| s.mode_of(label).map(|m| (k, m)))
            .ok_or_else(|| Error::UnknownArm(label.to_string()))
    }

    /// Element `index` embedded in the full mode space.
    pub fn element_operator(&self, index: usize) -> LinearOperator {
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); self.n_modes]; self.n_modes];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = Complex64::new(1.0, 0.0);
        }
        let element = &self.elements[index];
        let modes = element.modes();
        let block = element.block();
        for (a, &i) in modes.iter().enumerate() {
            for (b, &j) in modes.iter().enumerate() {
                rows[i][j] = block[a][b];
            }
        }
        LinearOperator::from_rows(&rows).expect("finite block")
    }

    fn check_slice(&self, slice: usize) -> Result<&Slice> {
        self.slices.get(slice).ok_or(Error::InvalidSlice { index: slice, count: self.slices.len() })
    }

    fn basis(&self, mode: usize) -> Vec<Complex64> {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.n_modes];
        amps[mode] = Complex64::new(1.0, 0.0);
        amps
    }

    /// Mode amplitudes at every detector after the full network.
    pub fn detector_probabilities(&self) -> Vec<(String, f64)> {
        let mut amps = self.basis(self.source_mode);
        for e in &self.elements {
            e.apply(&mut amps);
        }
        self.detectors.iter().map(|d| (d.label.clone(), amps[d.mode].norm_sqr())).collect()
    }
}

/// The source state evolved up to `slice`.
pub fn propagate(net: &OpticalNetwork, slice: usize) -> Result<StateVector> {
    let position = net.check_slice(slice)?.position;
    let mut amps = net.basis(net.source_mode);
    for e in &net.elements[..position] {
        e.apply(&mut amps);
    }
    StateVector::normalized(amps)
}

/// The post-selection detector state evolved back to `slice`, as a ket.
pub fn back_propagate(net: &OpticalNetwork, slice: usize) -> Result<StateVector> {
    let position = net.check_slice(slice)?.position;
    let mut amps = net.basis(net.postselect_mode());
    for e in net.elements[position..].iter().rev() {
        e.apply_adjoint(&mut amps);
    }
    StateVector::normalized(amps)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoStateVector {
    pub slice: usize,
    pub arms: Vec<(String, usize)>,
    pub forward: StateVector,
    pub backward: StateVector,
}

impl TwoStateVector {
    pub fn at(net: &OpticalNetwork, slice: usize) -> Result<Self> {
        Ok(Self {
            slice,
            arms: net.check_slice(slice)?.arms.clone(),
            forward: propagate(net, slice)?,
            backward: back_propagate(net, slice)?,
        })
    }

    /// `<out|in>`, independent of the slice.
    pub fn overlap(&self) -> Complex64 {
        self.backward.inner(&self.forward).expect("same mode space")
    }

    fn mode(&self, arm: &str) -> Result<usize> {
        self.arms.iter().find(|(l, _)| l == arm).map(|(_, m)| *m).ok_or_else(|| Error::UnknownArm(arm.into()))
    }

    pub fn forward_amplitude(&self, arm: &str) -> Result<Complex64> {
        Ok(self.forward.amps()[self.mode(arm)?])
    }

    pub fn backward_amplitude(&self, arm: &str) -> Result<Complex64> {
        Ok(self.backward.amps()[self.mode(arm)?])
    }

    /// `<out|Pi_arms|in> / <out|in>` for arms of this slice.
    pub fn weak_value(&self, arms: &[&str], detector: &str) -> Result<Complex64> {
        let overlap = self.overlap();
        if overlap.norm() <= OVERLAP_THRESHOLD {
            return Err(Error::DarkDetector(detector.to_string()));
        }
        let mut modes = Vec::with_capacity(arms.len());
        for arm in arms {
            let m = self.mode(arm)?;
            if !modes.contains(&m) {
                modes.push(m);
            }
        }
        let numerator: Complex64 = modes.iter().map(|&m| self.backward.amps()[m].conj() * self.forward.amps()[m]).sum();
        Ok(numerator / overlap)
    }
}

/// Two-state vectors at every slice, in order.
pub fn two_state_vectors(net: &OpticalNetwork) -> Result<Vec<TwoStateVector>> {
    (0..net.slices.len()).map(|k| TwoStateVector::at(net, k)).collect()
}

/// `(Pi_arm)_w` at the arm's first slice.
pub fn arm_weak_value(net: &OpticalNetwork, arm: &str) -> Result<Complex64> {
    let (slice, _) = net.locate(arm)?;
    TwoStateVector::at(net, slice)?.weak_value(&[arm], &net.postselect)
}

/// Weak value of the projector onto several arms of one slice.
pub fn region_weak_value(net: &OpticalNetwork, slice: usize, arms: &[&str]) -> Result<Complex64> {
    TwoStateVector::at(net, slice)?.weak_value(arms, &net.postselect)
}

/// Which arms carry a pointer while a trace is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceCoupling {
    /// Every labelled arm has its own pointer.
    #[default]
    AllArms,
    /// Only the probed arm is coupled.
    ProbedArmOnly,
}

/// Post-selected path amplitudes, grouped by the set of pointer arms each path visits.
#[derive(Debug, Clone)]
pub struct PathSum {
    arms: Vec<String>,
    /// Bitmask over `arms` -> amplitude at the post-selection detector.
    branches: BTreeMap<u64, Complex64>,
    overlap: Complex64,
    postselect: String,
}

impl PathSum {
    pub fn new(net: &OpticalNetwork, coupling: TraceCoupling, probe: Option<&str>) -> Result<Self> {
        let arms = match coupling {
            TraceCoupling::AllArms => net.arm_labels(),
            TraceCoupling::ProbedArmOnly => {
                let probe = probe.ok_or_else(|| Error::InvalidNetwork("single-pointer traces need a probed arm".into()))?;
                net.locate(probe)?;
                vec![probe.to_string()]
            }
        };
        if arms.len() > MAX_POINTER_ARMS {
            return Err(Error::InvalidNetwork(format!(
                "{} labelled arms exceed the limit of {MAX_POINTER_ARMS} pointers",
                arms.len()
            )));
        }
        let mut couplings: Vec<(usize, usize, u64)> = Vec::new();
        for (bit, arm) in arms.iter().enumerate() {
            let (slice, mode) = net.locate(arm)?;
            couplings.push((net.slices[slice].position, mode, 1u64 << bit));
        }

        let zero = Complex64::new(0.0, 0.0);
        let mut states: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
        states.insert(0, net.basis(net.source_mode));
        for position in 0..=net.elements.len() {
            for &(_, mode, bit) in couplings.iter().filter(|c| c.0 == position) {
                let mut split: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
                for (mask, mut amps) in std::mem::take(&mut states) {
                    let moved = std::mem::replace(&mut amps[mode], zero);
                    if moved != zero {
                        let mut branch = vec![zero; net.n_modes];
                        branch[mode] = moved;
                        split.insert(mask | bit, branch);
                    }
                    if amps.iter().any(|a| *a != zero) {
                        let entry = split.entry(mask).or_insert_with(|| vec![zero; net.n_modes]);
                        for (e, a) in entry.iter_mut().zip(amps) {
                            *e += a;
                        }
                    }
                }
                states = split;
            }
            if let Some(element) = net.elements.get(position) {
                for amps in states.values_mut() {
                    element.apply(amps);
                }
            }
        }
        let detector = net.postselect_mode();
        let branches: BTreeMap<u64, Complex64> =
            states.into_iter().map(|(mask, amps)| (mask, amps[detector])).filter(|(_, c)| *c != zero).collect();
        let overlap = branches.values().sum();
        Ok(Self { arms, branches, overlap, postselect: net.postselect.clone() })
    }

    pub fn arms(&self) -> &[String] {
        &self.arms
    }

    /// `<out|in>` recovered as the sum over all paths.
    pub fn overlap(&self) -> Complex64 {
        self.overlap
    }

    /// Weak trace of `arm` given the pointer's response at one `g`.
    pub fn trace(&self, arm: &str, shift: &PointerShift) -> Result<f64> {
        let bit = self.arms.iter().position(|a| a == arm).ok_or_else(|| Error::UnknownArm(arm.into()))?;
        let magnitude = self.overlap.norm();
        if magnitude <= OVERLAP_THRESHOLD {
            return Err(Error::DarkDetector(self.postselect.clone()));
        }
        if shift.disturbance == 0.0 {
            return Ok(0.0);
        }
        let probe = 1u64 << bit;
        let ov = shift.overlap;
        let orth = Complex64::new(shift.orthogonal, 0.0);
        // Components of chi in the basis {|m>, |m_perp>} of each other pointer,
        // keyed by the set of pointers in |m_perp>.
        let mut chi: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (&mask, &c) in self.branches.iter().filter(|(mask, _)| *mask & probe != 0) {
            let others = mask & !probe;
            let shifted: Vec<u64> = (0..self.arms.len()).map(|k| 1u64 << k).filter(|b| others & b != 0).collect();
            let perp_choices: u64 = if shift.orthogonal == 0.0 { 1 } else { 1 << shifted.len() };
            for choice in 0..perp_choices {
                let mut key = 0u64;
                let mut amp = c;
                for (k, b) in shifted.iter().enumerate() {
                    if choice >> k & 1 == 1 {
                        key |= b;
                        amp *= orth;
                    } else {
                        amp *= ov;
                    }
                }
                *chi.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp;
            }
        }
        let chi_norm = chi.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        Ok(shift.disturbance * chi_norm / magnitude)
    }
}

/// How one pointer responds to being shifted by `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerShift {
    pub g: f64,
    /// `<m|T(g)|m>`.
    pub overlap: Complex64,
    /// Norm of the part of `T(g)|m>` orthogonal to `|m>`.
    pub orthogonal: f64,
    /// `||T(g)|m> - |m>||`.
    pub disturbance: f64,
}

impl PointerShift {
    pub fn new(model: &PointerModel, g: f64) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::InvalidSchedule(format!("non-finite coupling {g}")));
        }
        if g == 0.0 {
            return Ok(Self { g, overlap: Complex64::new(1.0, 0.0), orthogonal: 0.0, disturbance: 0.0 });
        }
        let m = model.initial_state();
        let shifted = model.translate(&m, g)?;
        let overlap = m.inner(&shifted)?;
        let orthogonal = shifted.sub(&m.scaled(overlap))?.norm();
        let disturbance = shifted.distance(&m)?;
        Ok(Self { g, overlap, orthogonal, disturbance })
    }
}

/// Weak trace of `arm` with every labelled arm carrying a pointer.
pub fn weak_trace(net: &OpticalNetwork, arm: &str, model: &PointerModel, g: f64) -> Result<f64> {
    weak_trace_with(net, arm, model, g, TraceCoupling::AllArms)
}

pub fn weak_trace_with(
    net: &OpticalNetwork,
    arm: &str,
    model: &PointerModel,
    g: f64,
    coupling: TraceCoupling,
) -> Result<f64> {
    PathSum::new(net, coupling, Some(arm))?.trace(arm, &PointerShift::new(model, g)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Presence {
    Primary,
    Secondary,
    None,
}

impl Presence {
    pub fn name(self) -> &'static str {
        match self {
            Presence::Primary => "primary",
            Presence::Secondary => "secondary",
            Presence::None => "none",
        }
    }
}

impl From<OrderClass> for Presence {
    fn from(class: OrderClass) -> Self {
        match class {
            OrderClass::First => Presence::Primary,
            OrderClass::Second => Presence::Secondary,
            OrderClass::AllFloor => Presence::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmPresence {
    pub arm: String,
    pub g_values: Vec<f64>,
    pub traces: Vec<f64>,
    pub fit: OrderFit,
    pub presence: Presence,
}

/// Per-arm presence, sorted by arm label.
#[derive(Debug, Clone, PartialEq)]
pub struct PresenceReport {
    pub arms: Vec<ArmPresence>,
}

impl PresenceReport {
    pub fn get(&self, arm: &str) -> Option<&ArmPresence> {
        self.arms.iter().find(|a| a.arm == arm)
    }
}

/// Weak traces of several arms over a schedule, sharing one path sum.
pub fn trace_table(
    net: &OpticalNetwork,
    arms: &[&str],
    model: &PointerModel,
    schedule: &[f64],
) -> Result<Vec<(String, Vec<f64>)>> {
    let paths = PathSum::new(net, TraceCoupling::AllArms, None)?;
    let shifts = schedule.iter().map(|&g| PointerShift::new(model, g)).collect::<Result<Vec<_>>>()?;
    let mut sorted: Vec<&str> = arms.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted
        .into_iter()
        .map(|arm| {
            let traces = shifts.iter().map(|s| paths.trace(arm, s)).collect::<Result<Vec<_>>>()?;
            Ok((arm.to_string(), traces))
        })
        .collect()
}

/// Leading order of each arm's weak trace, mapped to primary/secondary/none.
pub fn classify_presence(
    net: &OpticalNetwork,
    arms: &[&str],
    model: &PointerModel,
    schedule: &[f64],
) -> Result<PresenceReport> {
    validate_schedule(schedule, 4)?;
    let table = trace_table(net, arms, model, schedule)?;
    let arms = table
        .into_iter()
        .map(|(arm, traces)| {
            let fit = fit_order(schedule, &traces)?;
            let presence = classify_order(&fit)?.into();
            Ok(ArmPresence { arm, g_values: schedule.to_vec(), traces, fit, presence })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PresenceReport { arms })
}

/// Nested Mach-Zehnder interferometer.
///
/// Modes: 0 carries the source, outer arm `A` and detector `D1`; 1 carries `D`,
/// inner arm `B`, `E` and detector `D2`; 2 carries the inner interferometer's
/// unused input `F`, inner arm `C`, the bright inner output `G` and detector
/// `D3`; 3 is a mode `O` outside the interferometer. Outer splitters transmit
/// 1/3, inner ones 1/2. With this splitter convention the inner interferometer
/// sends everything entering from `D` to `G`, so `E` is dark.
///
/// Weak values for post-selection on `D1`: `A = 1`, `B = -1`, `C = 1`,
/// `D = E = 0`, with `<out|in> = 1/3`.
pub fn build_nested_mzi() -> OpticalNetwork {
    let outer = 1.0 / 3.0;
    let elements = vec![
        Element::beam_splitter(0, 1, outer),
        Element::beam_splitter(1, 2, 0.5),
        Element::beam_splitter(1, 2, 0.5),
        Element::beam_splitter(0, 1, outer),
    ];
    let slices = vec![
        Slice::new(0, &[("S", 0)]),
        Slice::new(1, &[("A", 0), ("D", 1), ("F", 2)]),
        Slice::new(2, &[("A", 0), ("B", 1), ("C", 2), ("O", 3)]),
        Slice::new(3, &[("A", 0), ("E", 1), ("G", 2)]),
    ];
    let detectors = ["D1", "D2", "D3"]
        .iter()
        .enumerate()
        .map(|(mode, label)| Detector { label: label.to_string(), mode })
        .collect();
    OpticalNetwork::new(4, elements, slices, 0, detectors, "D1").expect("preset is valid")
}
