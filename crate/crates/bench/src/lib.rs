//! Inputs shared by the benchmarks.

use weaklab_core::scenario::{corpus_entry, parse, validate_semantics, Scenario};

/// A bundled scenario, parsed and validated.
pub fn bundled(name: &str) -> Scenario {
    let text = corpus_entry(name).unwrap_or_else(|| panic!("no bundled scenario `{name}`"));
    let doc = parse(text).expect("bundled scenarios parse");
    validate_semantics(&doc).expect("bundled scenarios validate")
}

/// Total size in bytes of every bundled scenario.
pub fn corpus_bytes() -> usize {
    weaklab_core::scenario::corpus().map(|(_, text)| text.len()).sum()
}
