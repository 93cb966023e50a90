//! Acceptance suite: one test per criterion, each printing a pass line.
//! Run with `cargo test --test acceptance -- --nocapture` to see them.

use std::path::Path;
use std::sync::Arc;

use analogue_lab::blip::Signal;
use analogue_lab::growth::{BitString, GrowthTree, StepOutcome};
use analogue_lab::harness::{self, ExperimentConfig};
use analogue_lab::precision::Cvq;
use analogue_lab::resets::{
    DiophantineVerifier, Enumerator, Schedule, WaitingTimeTable,
};
use analogue_lab::richardson::{
    beta_bound_from_limit, Cutoff, CutoffIntegral, Decoder, FDevice, Rho,
};
use analogue_lab::spectra::{classify, line_band_operator, rows_needed, OperatorKind};
use analogue_lab::Answer;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pass(criterion: &str) {
    println!("ACCEPTANCE {criterion}: PASS");
}

fn synthetic(pairs: &[(u64, u64)]) -> Enumerator {
    Enumerator::synthetic(Schedule::new(pairs.iter().copied()).unwrap())
}

fn pow2(e: i32) -> f64 {
    (e as f64).exp2()
}

/// Criterion 1: exact derivative values at `2^-j` and a finite-difference
/// derivative of the signal matching within 1e-6 at step `2^-28`.
#[test]
fn criterion_1_blip_exactness() {
    let pairs = [(1u64, 0u64), (3, 1), (4, 2), (6, 3), (7, 4)];
    let e = synthetic(&pairs);
    let signal = Signal::from_enumerator(&e, 64);
    let h = pow2(-28);
    for j in 0..8u32 {
        let x = pow2(-(j as i32));
        let member = pairs.iter().any(|&(m, _)| m == u64::from(j));
        let expected = if member { pow2(-2 * j as i32) } else { 0.0 };
        assert_eq!(
            signal.derivative_exact(x),
            expected,
            "exact derivative at 2^-{j}"
        );
        let fp = signal.value_at(x + h, 1e-15).unwrap().value;
        let fm = signal.value_at(x - h, 1e-15).unwrap().value;
        let fd = (fp - fm) / (2.0 * h);
        assert!(
            (fd - expected).abs() < 1e-6,
            "j = {j}: finite difference {fd} vs {expected}"
        );
    }
    pass("1 blip exactness");
}

/// Criterion 2: in a 10-octave time-precision sweep every member flips and
/// the threshold sits within two octaves of `nu(j) + j`; non-members are
/// correct at every tested precision.
#[test]
fn criterion_2_blip_claim_threshold() {
    let pairs = [(0u64, 3u64), (1, 0), (3, 2), (5, 7), (6, 5)];
    let config = ExperimentConfig::from_toml(
        r#"
experiment = "blip-differentiator"
j_max = 8
budget = 64

[source]
kind = "entries"
entries = [[0, 3], [1, 0], [3, 2], [5, 7], [6, 5]]

[blip]
octaves = 10
"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = harness::run(&config, Path::new("."), dir.path()).unwrap();
    let claim = report.claim.expect("sweep experiment has a claim analysis");
    assert!(claim.non_members_all_correct, "non-members at all precisions");
    assert!(claim.consistent);
    for &(j, nu) in &pairs {
        let q = claim
            .questions
            .iter()
            .find(|q| u64::from(q.j) == j && q.in_set)
            .expect("member analyzed");
        assert!(q.flip, "j = {j} must have a correctness flip");
        let t = q.threshold_log2.expect("member threshold exists");
        let target = (nu + j) as f64;
        assert!(
            (t - target).abs() <= 2.0,
            "j = {j}: log2 threshold {t} not within 2 of nu + j = {target}"
        );
    }
    pass("2 blip claim threshold");
}

/// Criterion 3: deleting a member's step moves the signal by at most
/// `2^-nu(j)` in sup norm over a 1e5-point grid, and kills the derivative
/// at `2^-j` to within 1e-9.
#[test]
fn criterion_3_perturbation() {
    let pairs = [(1u64, 0u64), (3, 2), (5, 4)];
    let e = synthetic(&pairs);
    let signal = Signal::from_enumerator(&e, 64);
    for &(j, nu) in &pairs {
        let perturbed = signal.without_member(j).unwrap();
        let mut sup = 0.0f64;
        let n = 100_000;
        for i in 0..=n {
            let x = 2.0 * i as f64 / n as f64;
            let a = signal.value_at(x, 1e-10).unwrap().value;
            let b = perturbed.value_at(x, 1e-10).unwrap().value;
            sup = sup.max((a - b).abs());
        }
        let bound = pow2(-(nu as i32));
        assert!(sup <= bound + 1e-9, "j = {j}: sup {sup} exceeds 2^-{nu}");

        let x = pow2(-(j as i32));
        assert!(perturbed.derivative_exact(x).abs() < 1e-9);
        // The device's stable finite difference agrees.
        let h = pow2(-28);
        let fd = perturbed.mass_between(x - h, x + h, 1e-18).unwrap() / (2.0 * h);
        assert!(fd.abs() < 1e-9, "perturbed derivative reads {fd}");
    }
    pass("3 perturbation");
}

/// Criterion 4: the five barrier properties on exhaustive grids with step
/// 0.05 for arities 1 and 2, with the non-member floor at 1.5.
#[test]
fn criterion_4_barrier_properties() {
    for (arity, pairs, g) in [
        (1usize, vec![(2u64, 3u64), (5, 1)], 3.0f64),
        (2, vec![(2, 2)], 2.5),
    ] {
        let schedule = Schedule::new(pairs.clone()).unwrap();
        let verifier = Arc::new(DiophantineVerifier::from_schedule(&schedule, arity).unwrap());
        let device = FDevice::new(verifier.clone(), Rho::Piecewise);
        let steps = (g / 0.05).round() as usize;
        let axis: Vec<f64> = (0..=steps).map(|i| i as f64 * 0.05).collect();
        let grid: Vec<Vec<f64>> = if arity == 1 {
            axis.iter().map(|&x| vec![x]).collect()
        } else {
            axis.iter()
                .flat_map(|&x| axis.iter().map(move |&y| vec![x, y]))
                .collect()
        };

        let calls_before = verifier.calls();
        let mut evals = 0u64;
        let mut non_member_min = f64::INFINITY;
        for xs in &grid {
            for j in 0..8u64 {
                let f = device.barrier(j, xs).unwrap();
                evals += 1;
                // Property 2: nonnegative.
                assert!(f >= 0.0);
                // Property 1: even in each coordinate, exactly.
                let mut flipped = xs.clone();
                flipped[0] = -flipped[0];
                let f_flipped = device.barrier(j, &flipped).unwrap();
                evals += 1;
                assert_eq!(f, f_flipped);
                let member = pairs.iter().any(|&(m, _)| m == j);
                if !member {
                    // Property 3 with margin 0.5.
                    non_member_min = non_member_min.min(f);
                    assert!(f >= 1.5, "non-member barrier {f} at {xs:?}");
                }
                // Property 4: a low barrier certifies a witness, and the
                // barrier vanishes at the rounded integer point.
                if f <= 1.0 {
                    let rounded: Vec<u64> =
                        xs.iter().map(|&x| (x * x + 0.5).floor() as u64).collect();
                    assert_eq!(verifier.evaluate(j, &rounded).unwrap(), 0);
                    let at_integers: Vec<f64> =
                        rounded.iter().map(|&m| (m as f64).sqrt()).collect();
                    let exact = device.barrier(j, &at_integers).unwrap();
                    evals += 2;
                    assert!(exact.abs() < 1e-9);
                }
            }
        }
        assert!(non_member_min >= 1.5);
        // Property 5, operationalized: every evaluation consults the
        // verifier at least once.
        assert!(verifier.calls() - calls_before >= evals);
    }
    pass("4 barrier properties");
}

/// Criterion 5: the decoded response is literally zero below the waiting
/// radius, the detection integral is zero for non-members, and positive
/// (above 10x the tolerance) for members once the limit covers the radius.
#[test]
fn criterion_5_zero_regions() {
    let pairs = [(3u64, 1u64), (5, 2), (7, 4), (9, 10)];
    let schedule = Schedule::new(pairs).unwrap();
    let verifier = Arc::new(DiophantineVerifier::from_schedule(&schedule, 1).unwrap());
    let device = FDevice::new(verifier, Rho::Piecewise);
    let decoder = Decoder::new(1);
    let tol = 1e-9;

    for &(j, nu) in &pairs {
        if nu >= 2 {
            let radius = ((nu - 1) as f64).sqrt();
            for i in 0..4000 {
                let t = radius * i as f64 / 4000.0;
                let b = device.response_along(&decoder, j, t).unwrap();
                assert_eq!(b, 0.0, "response must be literally zero at t = {t}");
            }
        }
    }
    for j in [0u64, 2, 4, 8] {
        let k = CutoffIntegral::new(Cutoff::ExpDecay, 8.0)
            .detection_value(&device, &decoder, j)
            .unwrap();
        assert!(k.abs() <= tol, "non-member K = {k:e}");
    }
    for &(j, nu) in &pairs {
        let b = 2.0 * (nu as f64).sqrt().max(1.0);
        let k = CutoffIntegral::new(Cutoff::ExpDecay, b)
            .detection_value(&device, &decoder, j)
            .unwrap();
        assert!(
            k > 10.0 * tol,
            "member j = {j} (nu = {nu}) reads K = {k:e} at limit {b}"
        );
    }
    pass("5 zero regions");
}

/// Criterion 6: across 20 (schedule, limit) pairs, every detected member's
/// waiting time is covered by the bound extracted from the limit.
#[test]
fn criterion_6_beta_bound_soundness() {
    let schedules: [&[(u64, u64)]; 5] = [
        &[(1, 1), (4, 3)],
        &[(2, 2), (3, 7)],
        &[(0, 5), (6, 1)],
        &[(5, 9), (2, 4)],
        &[(3, 10), (8, 6)],
    ];
    let mut checked = 0;
    for pairs in schedules {
        let schedule = Schedule::new(pairs.iter().copied()).unwrap();
        let verifier = Arc::new(DiophantineVerifier::from_schedule(&schedule, 1).unwrap());
        let device = FDevice::new(verifier, Rho::Piecewise);
        let decoder = Decoder::new(1);
        for b in [1.5f64, 3.0, 5.0, 7.0] {
            checked += 1;
            let bound = beta_bound_from_limit(b);
            for &(j, nu) in pairs {
                let k = CutoffIntegral::new(Cutoff::ExpDecay, b)
                    .detection_value(&device, &decoder, j)
                    .unwrap();
                let detected = k > 1e-8;
                if detected {
                    assert!(
                        bound >= nu,
                        "j = {j} detected at limit {b} but bound {bound} < nu {nu}"
                    );
                }
            }
        }
    }
    assert_eq!(checked, 20);
    pass("6 beta bound soundness");
}

/// Criterion 7: line-band classification flips within one octave of the
/// band width, and the rows needed equal `beta(J) + 1` on ten random
/// schedules.
#[test]
fn criterion_7_spectra_thresholds() {
    for (j, nu) in [(1u32, 4u64), (2, 5), (4, 8), (6, 11)] {
        let e = synthetic(&[(u64::from(j), nu)]);
        let table = WaitingTimeTable::build(&e, 64);
        let op = line_band_operator(&table, j + 2, 8).unwrap();
        let width = 2.0 * pow2(-(nu as i32));
        assert_eq!(
            classify(&op.measure(width / 2.0), j, OperatorKind::LineBand),
            Answer::Yes
        );
        assert_eq!(
            classify(&op.measure(width), j, OperatorKind::LineBand),
            Answer::No
        );
    }
    for seed in 0..10u64 {
        let schedule = Schedule::random_for_bands(seed, 10, 4);
        let beta = schedule.max_waiting_below(10);
        let e = Enumerator::synthetic(schedule);
        let needed = rows_needed(&e, 10, 64, 8).unwrap();
        assert_eq!(needed, beta + 1, "seed {seed}");
    }
    pass("7 spectra thresholds");
}

/// Criterion 8: the explorer stays left of the leftmost path and converges
/// on every sample tree, and the raw step matches a rule-by-rule reference
/// on every string of length at most 10.
#[test]
fn criterion_8_growth() {
    let family = analogue_lab::resets::MachineFamily::demo(16);
    let trees: Vec<(&str, GrowthTree)> = vec![
        ("full", GrowthTree::full()),
        (
            "pruned-left",
            GrowthTree::from_fn(|u| u.bit(0) != Some(false) || u.len() <= 3),
        ),
        (
            "right-comb",
            GrowthTree::from_fn(|u| {
                let bits = u.bits();
                let ones = bits.iter().take_while(|&&b| b).count();
                ones == bits.len() || (ones == bits.len() - 1 && !bits[bits.len() - 1])
            }),
        ),
        (
            "alternating",
            GrowthTree::from_fn(|u| u.bits().iter().enumerate().all(|(i, &b)| b == (i % 2 == 1))),
        ),
        (
            "few-ones",
            GrowthTree::from_fn(|u| u.bits().iter().filter(|&&b| b).count() <= 3),
        ),
        // Stage budget 16 keeps every constraint gate shallow, so doomed
        // left subtrees stay exhaustible at desk scale; larger budgets
        // reintroduce the uncomputable exploration blow-up.
        ("kleene", GrowthTree::kleene(&family, 16)),
    ];

    for (name, tree) in &trees {
        let trace = tree.run_trial(10_000);
        let lambda = tree
            .leftmost_path(24, 40)
            .unwrap_or_else(|| panic!("{name} has a deep path"));
        for u in trace.steps() {
            assert!(
                !u.lies_right_of(&lambda),
                "{name}: {u} lies right of {lambda}"
            );
        }
        for j in 0..=12usize {
            let prefix = tree.leftmost_path(j, 40).expect("prefix exists");
            assert!(
                trace.first_index_of(&prefix).is_some(),
                "{name}: no step reaches the leftmost prefix of length {j}"
            );
        }
    }

    // Direct rule-by-rule reference for the explorer step.
    fn reference_step(tree: &GrowthTree, u: &BitString) -> StepOutcome {
        let terminal = !tree.contains(&u.child(false)) && !tree.contains(&u.child(true));
        if !terminal {
            return StepOutcome::Next(u.child(false));
        }
        let bits = u.bits();
        match bits.iter().rposition(|&b| !b) {
            Some(i) => {
                let mut next = bits[..i].to_vec();
                next.push(true);
                StepOutcome::Next(BitString::from_bits(&next))
            }
            None => StepOutcome::ExhaustedRight,
        }
    }

    for (name, tree) in &trees {
        for len in 0..=10usize {
            for code in 0..(1u32 << len) {
                let bits: Vec<bool> = (0..len).map(|i| (code >> i) & 1 == 1).collect();
                let u = BitString::from_bits(&bits);
                if !tree.contains(&u) {
                    assert!(tree.trial_step(&u).is_err());
                    continue;
                }
                assert_eq!(
                    tree.trial_step(&u).unwrap(),
                    reference_step(tree, &u),
                    "{name}: rule mismatch at {u}"
                );
            }
        }
    }
    pass("8 growth");
}

/// Criterion 9: reruns are byte-identical and the module invariants hold
/// under 1e4 seeded random spot checks.
#[test]
fn criterion_9_determinism_and_spot_checks() {
    // Byte-identical reruns across all sweep experiments.
    for toml in [
        r#"
experiment = "blip-differentiator"
j_max = 6
budget = 64
[source]
kind = "entries"
entries = [[1, 0], [3, 2]]
[blip]
octaves = 8
"#,
        r#"
experiment = "spectra-T"
j_max = 8
budget = 64
seed = 5
[source]
kind = "random-bands"
members = 4
[spectra]
band_points = 2048
octaves = 12
"#,
        r#"
experiment = "growth-trial"
j_max = 8
budget = 64
[source]
kind = "machine-demo"
[growth]
max_steps = 2000
depth_budget = 14
"#,
    ] {
        let config = ExperimentConfig::from_toml(toml).unwrap();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        harness::run(&config, Path::new("."), dir_a.path()).unwrap();
        harness::run(&config, Path::new("."), dir_b.path()).unwrap();
        let paths_a = harness::report_paths(dir_a.path(), &config.experiment);
        let paths_b = harness::report_paths(dir_b.path(), &config.experiment);
        assert_eq!(
            std::fs::read(&paths_a.csv).unwrap(),
            std::fs::read(&paths_b.csv).unwrap(),
            "{} CSV differs between reruns",
            config.experiment
        );
        assert_eq!(
            std::fs::read(&paths_a.json).unwrap(),
            std::fs::read(&paths_b.json).unwrap(),
            "{} JSON differs between reruns",
            config.experiment
        );
    }

    // 1e4 randomized spot checks per invariant family, fixed seeds.
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    let q = Cvq::new("spot", 8.0, 0.125).unwrap();
    for _ in 0..10_000 {
        let v: f64 = rng.gen_range(-7.9..7.9);
        let r = q.quantize(v);
        assert!((r.value - v).abs() <= q.resolution() / 2.0 + 1e-12);
        assert_eq!(q.quantize(r.value).value, r.value);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let decoder = Decoder::new(3);
    for _ in 0..10_000 {
        let t: f64 = rng.gen_range(0.0..50.0);
        for i in 1..=3 {
            assert!(decoder.coordinate(t, i).unwrap().abs() <= t);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(92);
    let schedule = Schedule::new([(2, 3), (5, 1)]).unwrap();
    let verifier = Arc::new(DiophantineVerifier::from_schedule(&schedule, 2).unwrap());
    let device = FDevice::new(verifier, Rho::Piecewise);
    for _ in 0..10_000 {
        let xs = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let j = rng.gen_range(0..8u64);
        let f = device.barrier(j, &xs).unwrap();
        assert!(f >= 0.0);
        assert_eq!(f, device.barrier(j, &[-xs[0], xs[1]]).unwrap());
        // Both switch variants agree on where the response vanishes.
        let zero_a = Rho::Piecewise.eval(f) == 0.0;
        let zero_b = Rho::Smooth.eval(f) == 0.0;
        assert_eq!(zero_a, zero_b);
    }
    pass("9 determinism and spot checks");
}
