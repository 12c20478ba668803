//! Acceptance checks, one line per criterion. Exits non-zero if any fails.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fs;
use std::panic;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weaklab_core::interferometer::{
    arm_weak_value, build_nested_mzi, classify_presence, region_weak_value, weak_trace, Presence, TwoStateVector,
};
use weaklab_core::limits::{compare_limits, default_decade, LimitPlan, Metric, Probe};
use weaklab_core::scenario::{corpus, corpus_entry, parse, serialize, validate_semantics, Scenario};
use weaklab_core::weakmeas::{default_schedule, estimate_weak_value, expectation, time_reverse, weak_value, Apparatus};
use weaklab_core::{LinearOperator, PointerModel, PrePostSelection, StateVector};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scenario(name: &str) -> Scenario {
    let doc = parse(corpus_entry(name).expect("corpus entry")).expect("corpus parses");
    validate_semantics(&doc).expect("corpus validates")
}

fn state(re: &[f64]) -> StateVector {
    StateVector::from_real(re).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVector {
    let amps = (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    StateVector::new(amps).unwrap().into_normalized().unwrap()
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> LinearOperator {
    let mut rows = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        rows[i][i] = Complex64::new(rng.gen_range(-2.0..2.0), 0.0);
        for j in i + 1..dim {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            rows[i][j] = z;
            rows[j][i] = z.conj();
        }
    }
    LinearOperator::from_rows(&rows).unwrap()
}

/// Pre/post pair with `|<out|in>| >= 0.1`.
fn random_selection(rng: &mut ChaCha8Rng, dim: usize) -> PrePostSelection {
    loop {
        let pre = random_state(rng, dim);
        let post = random_state(rng, dim);
        if pre.inner(&post).unwrap().norm() >= 0.1 {
            return PrePostSelection::new(pre, post).unwrap();
        }
    }
}

fn expectations() -> Outcome {
    let spin = scenario("spin_splus_sminus");
    let doc = spin.doc();
    let (sz, splus, sminus) =
        (doc.operator("sz").unwrap(), doc.operator("splus").unwrap(), doc.operator("sminus").unwrap());
    let up_x = state(&[1.0, 1.0]);
    let up_z = state(&[1.0, 0.0]);
    let cases = [
        (expectation(&up_x, sz).unwrap(), 0.0),
        (expectation(&up_x, splus).unwrap(), FRAC_1_SQRT_2),
        (expectation(&up_x, sminus).unwrap(), -FRAC_1_SQRT_2),
        (expectation(&up_z, sz).unwrap(), 1.0),
    ];
    let worst = cases.iter().map(|(got, want)| (got - want).abs()).fold(0.0, f64::max);
    check(worst <= 1e-12, format!("max deviation {worst:.2e} (tol 1e-12)"))
}

fn additivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let dim = rng.gen_range(2..=8);
        let a = random_hermitian(&mut rng, dim);
        let b = random_hermitian(&mut rng, dim);
        let sel = random_selection(&mut rng, dim);
        let sum = weak_value(&sel, &a.add(&b).unwrap()).unwrap();
        let parts = weak_value(&sel, &a).unwrap() + weak_value(&sel, &b).unwrap();
        worst = worst.max((sum - parts).norm());
    }
    let spin = scenario("spin_splus_sminus");
    let sel = spin.selection().unwrap();
    let doc = spin.doc();
    let w = |name: &str| weak_value(sel, doc.operator(name).unwrap()).unwrap();
    let decomposition = (w("sz") - (w("splus") + w("sminus")) / SQRT_2).norm();
    check(
        worst <= 1e-12 && decomposition <= 1e-12,
        format!("1000 random pairs max {worst:.2e}, decomposition {decomposition:.2e} (tol 1e-12)"),
    )
}

fn continuity() -> Outcome {
    let decade = default_decade();
    let mut lines = Vec::new();
    let mut ok = true;
    let mut checked = 0;
    for (name, text) in corpus() {
        let scn = validate_semantics(&parse(text).unwrap()).unwrap();
        let (Some(sel), Some(obs)) = (scn.selection(), scn.observable()) else {
            continue;
        };
        checked += 1;
        let probe = Probe::new(sel.pre(), obs, scn.pointer()).unwrap();
        let cont = probe.sweep(Metric::Continuity, &decade).unwrap().fit;
        let resid = probe.sweep(Metric::FirstOrderResidual, &decade).unwrap().fit;
        // A metric that stays on the floor at every g is exactly zero; its
        // order is reported as +inf.
        let cont_ok = cont.order >= 0.95;
        let resid_ok = resid.is_all_floor() || (resid.order - 2.0).abs() <= 0.1;
        ok &= cont_ok && resid_ok;
        lines.push(format!("{name}: continuity {:.3}, residual {:.3}", cont.order, resid.order));
    }
    ok &= checked >= 5;
    check(ok, format!("{checked} scenarios; {}", lines.join("; ")))
}

fn eigenvalue_zero() -> Outcome {
    let scn = scenario("eigenvalue_zero");
    let obs = scn.observable().unwrap();
    let input = scn.selection().unwrap().pre();
    let null = obs.apply(input).unwrap().norm();
    let apparatus = Apparatus::new(obs, scn.pointer()).unwrap();
    let initial = apparatus.initial(input).unwrap();
    let mut worst = 0.0_f64;
    for g in [0.1, 1.0, 10.0] {
        worst = worst.max(apparatus.evolve(input, g).unwrap().distance(&initial).unwrap());
    }
    check(
        null == 0.0 && worst <= 1e-13,
        format!("|S|in>| = {null:.1e}, max ||U(g)Psi0 - Psi0|| {worst:.2e} (tol 1e-13)"),
    )
}

fn numeric_weak_values() -> Outcome {
    let spin = scenario("spin_splus_sminus");
    let sel = spin.selection().unwrap();
    let model = PointerModel::gaussian(2.0).unwrap();
    let schedule = default_schedule(&model);
    let mut worst = 0.0_f64;
    let mut parts = Vec::new();
    for (name, expected) in [("sz", 1.0), ("splus", SQRT_2), ("sminus", 0.0)] {
        let op = spin.doc().operator(name).unwrap();
        let analytic = weak_value(sel, op).unwrap();
        let numeric = estimate_weak_value(sel, op, &model, &schedule).unwrap().value;
        let dev = (numeric - analytic).norm();
        worst = worst.max(dev).max((analytic - expected).norm());
        parts.push(format!("{name} {:.6}", numeric.re));
    }
    check(worst <= 1e-3, format!("{}; max deviation {worst:.2e} (tol 1e-3)", parts.join(", ")))
}

fn time_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0_f64;
    for _ in 0..1000 {
        let dim = rng.gen_range(2..=8);
        let s = random_hermitian(&mut rng, dim);
        let sel = random_selection(&mut rng, dim);
        let forward = weak_value(&sel, &s).unwrap();
        let reversed = weak_value(&time_reverse(&sel), &s).unwrap();
        worst = worst.max((reversed - forward.conj()).norm());
    }
    check(worst <= 1e-12, format!("1000 random cases max {worst:.2e} (tol 1e-12)"))
}

fn nested_interferometer() -> Outcome {
    let net = build_nested_mzi();
    let amplitude = |arm: &str| {
        let (slice, _) = net.locate(arm).unwrap();
        TwoStateVector::at(&net, slice).unwrap().forward_amplitude(arm).unwrap().norm()
    };
    let (fwd_e, fwd_d) = (amplitude("E"), amplitude("D"));
    let w = |arm: &str| arm_weak_value(&net, arm).unwrap();
    let vanishing = w("D").norm().max(w("E").norm());
    let smallest = ["A", "B", "C"].iter().map(|a| w(a).norm()).fold(f64::INFINITY, f64::min);
    let mut sum_rule = 0.0_f64;
    for (k, slice) in net.slices().iter().enumerate() {
        let arms: Vec<&str> = slice.arms.iter().map(|(l, _)| l.as_str()).collect();
        sum_rule = sum_rule.max((region_weak_value(&net, k, &arms).unwrap() - 1.0).norm());
    }
    check(
        fwd_e <= 1e-12 && fwd_d > 0.1 && vanishing <= 1e-12 && smallest > 0.1 && sum_rule <= 1e-12,
        format!(
            "|fwd E| {fwd_e:.1e}, |fwd D| {fwd_d:.3}, max |w_D|,|w_E| {vanishing:.1e}, min |w_A..C| {smallest:.3}, \
             sum rule {sum_rule:.1e}"
        ),
    )
}

fn presence() -> Outcome {
    let net = build_nested_mzi();
    let model = PointerModel::gaussian(2.0).unwrap();
    let report = classify_presence(&net, &["A", "B", "C", "D", "E", "O"], &model, &default_decade()).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for arm in &report.arms {
        let good = match arm.arm.as_str() {
            "A" | "B" | "C" => arm.presence == Presence::Primary && (arm.fit.order - 1.0).abs() <= 0.1,
            "D" | "E" => arm.presence == Presence::Secondary && (arm.fit.order - 2.0).abs() <= 0.15,
            _ => arm.presence == Presence::None && arm.fit.is_all_floor(),
        };
        ok &= good;
        parts.push(format!("{} {} {:.3}", arm.arm, arm.presence.name(), arm.fit.order));
    }
    let ratio = |g: f64| weak_trace(&net, "A", &model, g).unwrap() / weak_trace(&net, "E", &model, g).unwrap();
    let growth = ratio(1e-3) / ratio(1e-2);
    ok &= report.arms.len() == 6 && growth >= 8.0;
    check(ok, format!("{}; A/E growth per decade {growth:.2}", parts.join(", ")))
}

fn limit_comparison() -> Outcome {
    let spin = scenario("spin_sz");
    let plan = LimitPlan::default();
    let cmp = compare_limits(spin.selection().unwrap(), spin.observable().unwrap(), &plan).unwrap();
    let (coupling, spread) = (cmp.finest_coupling_deviation(), cmp.finest_spread_deviation());
    check(
        coupling <= 1e-3 && spread <= 1e-3 && plan.fixed_spread == 2.0 && plan.fixed_g == 0.5,
        format!(
            "g -> {:.2e}: {coupling:.2e}; spread -> {}: {spread:.2e} (tol 1e-3)",
            plan.g_schedule.last().unwrap(),
            plan.spread_schedule.last().unwrap()
        ),
    )
}

/// Parses and, on success, validates; panics propagate to the caller.
fn run_pipeline(text: &str) -> bool {
    match parse(text) {
        Ok(doc) => {
            let _ = validate_semantics(&doc);
            true
        }
        Err(diags) => {
            let lines: Vec<&str> = text.split('\n').collect();
            assert!(!diags.is_empty());
            for d in diags {
                let line = lines.get(d.position.line - 1).expect("diagnostic line in range");
                assert!(d.position.column >= 1 && d.position.column <= line.chars().count() + 1);
            }
            false
        }
    }
}

fn mutate(rng: &mut ChaCha8Rng, base: &str) -> String {
    let mut chars: Vec<char> = base.chars().collect();
    const ALPHABET: &[char] = &['[', ']', '=', ',', ';', ':', '#', '(', ')', '+', '-', '*', '/', 'i', 'e', '.', '0', '9', ' ', '\n', 'x', 'é'];
    match rng.gen_range(0..5) {
        0 => {
            let cut = rng.gen_range(0..=chars.len());
            chars.truncate(cut);
        }
        1 => {
            for _ in 0..rng.gen_range(1..8) {
                let at = rng.gen_range(0..=chars.len());
                chars.insert(at, ALPHABET[rng.gen_range(0..ALPHABET.len())]);
            }
        }
        2 => {
            for _ in 0..rng.gen_range(1..8) {
                if !chars.is_empty() {
                    let at = rng.gen_range(0..chars.len());
                    chars.remove(at);
                }
            }
        }
        3 => {
            let lines: Vec<&str> = base.split('\n').collect();
            let mut out: Vec<&str> = Vec::new();
            for line in &lines {
                out.push(line);
                if rng.gen_bool(0.1) {
                    out.push(lines[rng.gen_range(0..lines.len())]);
                }
            }
            return out.join("\n");
        }
        _ => {
            let bytes: Vec<u8> = (0..rng.gen_range(0..200)).map(|_| rng.gen()).collect();
            let body = String::from_utf8_lossy(&bytes).into_owned();
            return if rng.gen_bool(0.5) { format!("tsvf-scenario v1\n{body}") } else { body };
        }
    }
    chars.into_iter().collect()
}

fn parser_robustness() -> Outcome {
    let mut round_trips = 0;
    for (_, text) in corpus() {
        let doc = parse(text).map_err(|d| format!("corpus failed to parse: {d:?}"))?;
        let canonical = serialize(&doc);
        if parse(&canonical).ok().as_ref() == Some(&doc) && serialize(&parse(&canonical).unwrap()) == canonical {
            round_trips += 1;
        }
    }

    let bases: Vec<&str> = corpus().map(|(_, t)| t).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let previous = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let (mut crashes, mut accepted) = (0, 0);
    for _ in 0..10_000 {
        let base = bases[rng.gen_range(0..bases.len())];
        let input = mutate(&mut rng, base);
        match panic::catch_unwind(|| run_pipeline(&input)) {
            Ok(true) => accepted += 1,
            Ok(false) => {}
            Err(_) => crashes += 1,
        }
    }
    panic::set_hook(previous);

    let (seeded, mismatches) = seeded_errors()?;
    check(
        round_trips == bases.len() && crashes == 0 && seeded == 20 && mismatches.is_empty(),
        format!(
            "round trips {round_trips}/{}; fuzz 10000 inputs, {crashes} crashes, {accepted} accepted; \
             seeded {}/{seeded} positions verified{}",
            bases.len(),
            seeded - mismatches.len(),
            if mismatches.is_empty() { String::new() } else { format!(" [{}]", mismatches.join("; ")) }
        ),
    )
}

/// Each fixture's second line reads `# expect <line>:<column> <message fragment>`.
fn seeded_errors() -> Result<(usize, Vec<String>), String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/errors");
    let mut files: Vec<_> = fs::read_dir(&dir).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    files.sort();
    let mut mismatches = Vec::new();
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let expect = text.lines().nth(1).and_then(|l| l.strip_prefix("# expect ")).ok_or(format!("{name}: no expectation"))?;
        let (at, fragment) = expect.split_once(' ').unwrap();
        let diags = match parse(&text) {
            Err(d) => d,
            Ok(doc) => match validate_semantics(&doc) {
                Err(d) => d,
                Ok(_) => {
                    mismatches.push(format!("{name}: accepted"));
                    continue;
                }
            },
        };
        let first = diags.iter().find(|d| d.is_error()).unwrap();
        if first.position.to_string() != at || !first.message.contains(fragment) {
            mismatches.push(format!("{name}: got {first}"));
        }
    }
    Ok((files.len(), mismatches))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("expectation conditions", expectations),
        ("additivity", additivity),
        ("continuity", continuity),
        ("eigenvalue-zero exactness", eigenvalue_zero),
        ("numeric vs analytic weak values", numeric_weak_values),
        ("time symmetry", time_symmetry),
        ("nested interferometer", nested_interferometer),
        ("presence classification", presence),
        ("limit comparison", limit_comparison),
        ("parser robustness", parser_robustness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} {:>2} {name} ({secs:.2}s): {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
