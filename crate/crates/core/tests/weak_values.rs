use num_complex::Complex64;
use proptest::prelude::*;

use weaklab_core::limits::Probe;
use weaklab_core::qcore::coupling_unitary;
use weaklab_core::weakmeas::{default_schedule, estimate_weak_value, time_reverse, weak_value};
use weaklab_core::{LinearOperator, PointerModel, PrePostSelection, StateVector};

fn state_strategy(dim: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim)
        .prop_filter("nonzero", |v| v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let amps = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            StateVector::new(amps).unwrap().into_normalized().unwrap()
        })
}

fn hermitian_strategy(dim: usize) -> impl Strategy<Value = LinearOperator> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), dim * dim).prop_map(move |v| {
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let (a, b) = v[i * dim + j];
                let z = Complex64::new(a, b);
                rows[i][j] += z / 2.0;
                rows[j][i] += z.conj() / 2.0;
            }
        }
        LinearOperator::from_rows(&rows).unwrap()
    })
}

fn selection_strategy(dim: usize) -> impl Strategy<Value = PrePostSelection> {
    (state_strategy(dim), state_strategy(dim))
        .prop_filter("non-orthogonal", |(a, b)| a.inner(b).unwrap().norm() > 0.2)
        .prop_map(|(a, b)| PrePostSelection::new(a, b).unwrap())
}

fn case(max_dim: usize) -> impl Strategy<Value = (PrePostSelection, LinearOperator, LinearOperator)> {
    (2..=max_dim).prop_flat_map(|d| (selection_strategy(d), hermitian_strategy(d), hermitian_strategy(d)))
}

proptest! {
    #[test]
    fn weak_values_are_linear((sel, a, b) in case(6), c in -3.0..3.0f64) {
        let combined = a.scale(c).unwrap().add(&b).unwrap();
        let expected = weak_value(&sel, &a).unwrap() * c + weak_value(&sel, &b).unwrap();
        prop_assert!((weak_value(&sel, &combined).unwrap() - expected).norm() < 1e-11);
    }

    #[test]
    fn swapping_selections_conjugates((sel, a, _) in case(6)) {
        let w = weak_value(&sel, &a).unwrap();
        let r = weak_value(&time_reverse(&sel), &a).unwrap();
        prop_assert!((r - w.conj()).norm() < 1e-12);
    }

    #[test]
    fn identity_has_unit_weak_value(sel in (2..=6usize).prop_flat_map(selection_strategy)) {
        let w = weak_value(&sel, &LinearOperator::identity(sel.dim())).unwrap();
        prop_assert!((w - 1.0).norm() < 1e-12);
    }

    #[test]
    fn coupling_is_unitary((_, s, p) in case(4), g in -5.0..5.0f64) {
        let u = coupling_unitary(&s, &p, g).unwrap();
        prop_assert!(u.unitarity_deviation() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn derail_never_exceeds_continuity((sel, s, _) in case(3), g in 1e-4..1.0f64) {
        let probe = Probe::new(sel.pre(), &s, &PointerModel::qubit()).unwrap();
        let (derail, continuity) = (probe.derail(g).unwrap(), probe.continuity(g).unwrap());
        prop_assert!(derail <= continuity + 1e-12);
        prop_assert!(continuity <= 2.0 + 1e-12);
    }

    #[test]
    fn pointer_estimate_tracks_analytic_value(sel in selection_strategy(2), angle in 0.0..std::f64::consts::PI) {
        let s = LinearOperator::pauli_z()
            .scale(angle.cos())
            .unwrap()
            .add(&LinearOperator::pauli_x().scale(angle.sin()).unwrap())
            .unwrap();
        let model = PointerModel::gaussian(2.0).unwrap();
        let analytic = weak_value(&sel, &s).unwrap();
        // The schedule starts at 0.04; keep g |w| well inside the linear regime.
        prop_assume!(analytic.norm() < 3.0);
        let numeric = estimate_weak_value(&sel, &s, &model, &default_schedule(&model)).unwrap().value;
        prop_assert!((numeric - analytic).norm() < 1e-3, "{numeric} vs {analytic}");
    }
}
