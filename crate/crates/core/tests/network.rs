use num_complex::Complex64;
use proptest::prelude::*;

use weaklab_core::interferometer::{
    arm_weak_value, classify_presence, propagate, region_weak_value, trace_table, weak_trace, Detector, Element,
    OpticalNetwork, PathSum, Presence, Slice, TraceCoupling, TwoStateVector,
};
use weaklab_core::limits::default_decade;
use weaklab_core::{PointerModel, StateVector};

const LABELS: [&str; 5] = ["P", "Q", "R", "S", "T"];

fn element_strategy(modes: usize) -> impl Strategy<Value = Element> {
    prop_oneof![
        (0..modes, 1..modes, 0.05..0.95f64)
            .prop_map(move |(a, shift, t)| Element::beam_splitter(a, (a + shift) % modes, t)),
        (0..modes, -3.0..3.0f64).prop_map(|(m, phi)| Element::phase_shift(m, phi)),
    ]
}

/// A random network with one labelled slice (every mode an arm) and one
/// detector per mode.
fn network_strategy() -> impl Strategy<Value = OpticalNetwork> {
    (2..=4usize)
        .prop_flat_map(|modes| {
            (Just(modes), prop::collection::vec(element_strategy(modes), 2..8), 0..modes, 0..modes, 0.0..1.0f64)
        })
        .prop_map(|(modes, elements, source, post, cut)| {
            let position = ((elements.len() as f64) * cut) as usize;
            let arms: Vec<(&str, usize)> = (0..modes).map(|m| (LABELS[m], m)).collect();
            let detectors = (0..modes).map(|m| Detector { label: format!("D{m}"), mode: m }).collect();
            OpticalNetwork::new(
                modes,
                elements,
                vec![Slice::new(position, &arms)],
                source,
                detectors,
                &format!("D{post}"),
            )
            .unwrap()
        })
}

fn bright(net: &OpticalNetwork) -> bool {
    TwoStateVector::at(net, 0).unwrap().overlap().norm() > 0.1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detector_probabilities_sum_to_one(net in network_strategy()) {
        let total: f64 = net.detector_probabilities().iter().map(|(_, p)| p).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn propagation_matches_matrix_product(net in network_strategy()) {
        let position = net.slices()[0].position;
        let mut state = StateVector::basis(net.n_modes(), net.source_mode()).unwrap();
        for i in 0..position {
            state = net.element_operator(i).apply(&state).unwrap();
        }
        prop_assert!(propagate(&net, 0).unwrap().distance(&state).unwrap() < 1e-12);
    }

    #[test]
    fn slice_weak_values_sum_to_one(net in network_strategy()) {
        prop_assume!(bright(&net));
        let arms: Vec<&str> = LABELS[..net.n_modes()].to_vec();
        let total: Complex64 = arms.iter().map(|a| arm_weak_value(&net, a).unwrap()).sum();
        prop_assert!((total - 1.0).norm() < 1e-12);
        prop_assert!((region_weak_value(&net, 0, &arms).unwrap() - total).norm() < 1e-12);
    }

    #[test]
    fn path_sum_recovers_overlap(net in network_strategy()) {
        let direct = TwoStateVector::at(&net, 0).unwrap().overlap();
        for coupling in [TraceCoupling::AllArms, TraceCoupling::ProbedArmOnly] {
            let paths = PathSum::new(&net, coupling, Some("P")).unwrap();
            prop_assert!((paths.overlap() - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn nonzero_weak_value_means_primary(net in network_strategy()) {
        prop_assume!(bright(&net));
        let arms: Vec<&str> = LABELS[..net.n_modes()].to_vec();
        let model = PointerModel::gaussian(2.0).unwrap();
        let report = classify_presence(&net, &arms, &model, &default_decade()).unwrap();
        for arm in &report.arms {
            let w = arm_weak_value(&net, &arm.arm).unwrap();
            if w.norm() > 0.05 {
                prop_assert_eq!(arm.presence, Presence::Primary);
                prop_assert!((arm.fit.order - 1.0).abs() < 0.1);
            }
            prop_assert!(weak_trace(&net, &arm.arm, &model, 0.0).unwrap() == 0.0);
        }
    }
}

#[test]
fn trace_does_not_depend_on_where_an_arm_is_labelled() {
    // Labelling the same modes one element later (after a phase shift on an
    // unrelated mode) must not change anything.
    let elements = vec![
        Element::beam_splitter(0, 1, 0.3),
        Element::phase_shift(2, 0.7),
        Element::beam_splitter(0, 1, 0.6),
        Element::beam_splitter(1, 2, 0.5),
    ];
    let detectors = vec![
        Detector { label: "D0".into(), mode: 0 },
        Detector { label: "D1".into(), mode: 1 },
        Detector { label: "D2".into(), mode: 2 },
    ];
    let build = |position| {
        OpticalNetwork::new(
            3,
            elements.clone(),
            vec![Slice::new(position, &[("U", 0), ("V", 1)])],
            0,
            detectors.clone(),
            "D2",
        )
        .unwrap()
    };
    let (early, late) = (build(1), build(2));
    let model = PointerModel::gaussian(2.0).unwrap();
    let schedule = [1e-2, 1e-3];
    let a = trace_table(&early, &["U", "V"], &model, &schedule).unwrap();
    let b = trace_table(&late, &["U", "V"], &model, &schedule).unwrap();
    for ((_, x), (_, y)) in a.iter().zip(&b) {
        for (p, q) in x.iter().zip(y) {
            assert!((p - q).abs() <= 1e-14 * p.abs().max(1.0));
        }
    }
    for arm in ["U", "V"] {
        assert!((arm_weak_value(&early, arm).unwrap() - arm_weak_value(&late, arm).unwrap()).norm() < 1e-14);
    }
}
