//! Scenario files shipped with the crate.

pub const CORPUS_NAMES: [&str; 6] = [
    "spin_sz",
    "spin_splus_sminus",
    "spin_flipped",
    "eigenvalue_zero",
    "nested_mzi_presence",
    "compare_limits_demo",
];

const TEXTS: [&str; 6] = [
    include_str!("../../scenarios/spin_sz.scn"),
    include_str!("../../scenarios/spin_splus_sminus.scn"),
    include_str!("../../scenarios/spin_flipped.scn"),
    include_str!("../../scenarios/eigenvalue_zero.scn"),
    include_str!("../../scenarios/nested_mzi_presence.scn"),
    include_str!("../../scenarios/compare_limits_demo.scn"),
];

/// `(name, text)` for every bundled scenario.
pub fn corpus() -> impl Iterator<Item = (&'static str, &'static str)> {
    CORPUS_NAMES.into_iter().zip(TEXTS)
}

pub fn corpus_entry(name: &str) -> Option<&'static str> {
    corpus().find(|(n, _)| *n == name).map(|(_, text)| text)
}
