use std::fs;
use std::path::Path;

use num_complex::Complex64;
use proptest::prelude::*;

use weaklab_core::scenario::{corpus, format_complex, parse, serialize, validate_semantics};

#[test]
fn bundled_files_match_the_corpus() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut on_disk = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let stem = path.file_stem().unwrap().to_string_lossy().into_owned();
        let (_, text) = corpus().find(|(n, _)| *n == stem).unwrap_or_else(|| panic!("{stem} missing from corpus"));
        assert_eq!(fs::read_to_string(&path).unwrap(), text);
        on_disk += 1;
    }
    assert_eq!(on_disk, corpus().count());
}

#[test]
fn serialized_form_is_a_fixed_point() {
    for (name, text) in corpus() {
        let once = serialize(&parse(text).unwrap());
        let twice = serialize(&parse(&once).unwrap());
        assert_eq!(once, twice, "{name}");
    }
}

#[test]
fn diagnostics_are_sorted_and_complete() {
    let text = "tsvf-scenario v1\n[system]\ndim = 2\n[state a]\namps = 1, x\n[state b]\namps = 1\n";
    let diags = parse(text).unwrap_err();
    let positions: Vec<String> = diags.iter().map(|d| d.position.to_string()).collect();
    assert_eq!(positions, ["1:1", "5:11", "7:8"]);
}

fn complex() -> impl Strategy<Value = Complex64> {
    let part = prop_oneof![Just(0.0), -10.0..10.0f64, (-300i32..300).prop_map(|e| 10f64.powi(e))];
    (part.clone(), part).prop_map(|(a, b)| Complex64::new(a, b))
}

proptest! {
    #[test]
    fn generated_documents_round_trip(
        amps in prop::collection::vec(complex(), 3),
        matrix in prop::collection::vec(complex(), 9),
        spread in 0.5..8.0f64,
    ) {
        let row = |k: usize| matrix[3 * k..3 * k + 3].iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(", ");
        let text = format!(
            "tsvf-scenario v1\n[system]\ndim = 3\n[state psi]\namps = {}\n[operator m]\nmatrix = {}; {}; {}\n\
             [pointer]\nmodel = gaussian\nspread = {spread}\n[experiment]\nkind = trace\n",
            amps.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(", "),
            row(0), row(1), row(2),
        );
        let doc = parse(&text).unwrap();
        prop_assert_eq!(&doc.states["psi"], &amps);
        prop_assert_eq!(parse(&serialize(&doc)).unwrap(), doc);
    }

    #[test]
    fn arbitrary_text_never_panics(text in "\\PC{0,300}") {
        let body = format!("tsvf-scenario v1\n{text}");
        if let Ok(doc) = parse(&body) {
            let _ = validate_semantics(&doc);
        }
        let _ = parse(&text);
    }
}
