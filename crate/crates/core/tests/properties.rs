use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;
use qvdb_core::engine::{classify, Presence};
use qvdb_core::qstate::{apply_unitary, gate_unitary, unitary_distance};
use qvdb_core::vecdb::Entry;
use qvdb_core::{
    build_cs_oracle, build_cz_oracle, build_diffusion, circuit_unitary, decompose_mc_phase,
    export_qasm, grover_search, grover_search_cz, init_uniform, key_phase, lower_key_phase,
    pad_database, sample_counts, BasisKey, Circuit, ControlSpec, Database, Gate, GateOp,
    ProbabilityDistribution, QuerySet, SearchConfig, StateVector,
};

fn gate_strategy() -> impl Strategy<Value = Gate> {
    prop_oneof![
        Just(Gate::H),
        Just(Gate::X),
        Just(Gate::Z),
        Just(Gate::S),
        Just(Gate::Sdg),
        (-PI..PI).prop_map(Gate::Phase),
    ]
}

/// A gate on `n` qubits: permutation seed picks target and controls.
fn op_strategy(n: usize) -> impl Strategy<Value = GateOp> {
    let plain = (
        gate_strategy(),
        Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
        0..n,
        proptest::collection::vec(any::<bool>(), n),
    )
        .prop_map(|(gate, qubits, n_controls, pols)| {
            let controls = qubits[1..]
                .iter()
                .take(n_controls)
                .zip(&pols)
                .map(|(&q, &p)| ControlSpec::with_bit(q, p))
                .collect();
            GateOp::controlled(gate, qubits[0], controls)
        });
    let keyed = (0..1u64 << n, -PI..PI)
        .prop_map(move |(v, theta)| key_phase(BasisKey::new(v, n).unwrap(), theta));
    prop_oneof![4 => plain, 1 => keyed]
}

fn circuit_strategy(max_n: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (1..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(op_strategy(n), 0..=max_gates)
            .prop_map(move |ops| Circuit::from_ops(n, ops).unwrap())
    })
}

fn random_state_strategy(max_n: usize) -> impl Strategy<Value = StateVector> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << n)
            .prop_filter("non-degenerate", |v| {
                v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
            })
            .prop_map(|v| {
                let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
                StateVector::from_amplitudes(
                    v.into_iter()
                        .map(|(a, b)| Complex64::new(a / norm, b / norm))
                        .collect(),
                )
                .unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn norm_preserved_after_every_gate(circuit in circuit_strategy(6, 50)) {
        let mut state = init_uniform(circuit.n_qubits()).unwrap();
        for op in circuit.ops() {
            state.apply(op).unwrap();
            prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn fast_kernel_matches_dense_product(circuit in circuit_strategy(6, 50)) {
        let start = init_uniform(circuit.n_qubits()).unwrap();
        let dense = apply_unitary(&circuit_unitary(&circuit).unwrap(), &start).unwrap();
        let mut fast = start;
        fast.apply_circuit(&circuit).unwrap();
        for (a, b) in fast.amplitudes().iter().zip(&dense) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn dense_circuit_is_unitary(circuit in circuit_strategy(5, 30)) {
        let u = circuit_unitary(&circuit).unwrap();
        prop_assert!(qvdb_core::qstate::unitarity_deviation(&u) < 1e-10);
    }

    #[test]
    fn diffusion_gates_match_reflection(state in random_state_strategy(6)) {
        let n = state.n_qubits();
        let mut gates = state.clone();
        gates.apply_circuit(&build_diffusion(n).unwrap()).unwrap();
        let mut analytic = state;
        analytic.reflect_about_mean();
        for (a, b) in gates.probabilities().as_slice().iter().zip(analytic.probabilities().as_slice()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        // the two differ by exactly the documented −1 global phase
        for (a, b) in gates.amplitudes().iter().zip(analytic.amplitudes()) {
            prop_assert!((a + b).norm() < 1e-12);
        }
    }

    #[test]
    fn key_phase_touches_one_amplitude(
        n in 1usize..=6,
        seed in any::<u64>(),
        theta in -PI..PI,
    ) {
        let value = seed % (1 << n);
        let start = {
            let mut s = init_uniform(n).unwrap();
            s.apply(&GateOp::phase(0.3, 0)).unwrap();
            s
        };
        let mut after = start.clone();
        after.apply(&key_phase(BasisKey::new(value, n).unwrap(), theta)).unwrap();
        for (k, (a, b)) in start.amplitudes().iter().zip(after.amplitudes()).enumerate() {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-15);
            if k as u64 == value {
                prop_assert!((b - a * Complex64::from_polar(1.0, theta)).norm() < 1e-15);
            } else {
                prop_assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_complete(seed in any::<u64>(), shots in 1u64..5000) {
        let dist = init_uniform(3).unwrap().probabilities();
        let a = sample_counts(&dist, shots, seed).unwrap();
        prop_assert_eq!(a.counts().iter().sum::<u64>(), shots);
        prop_assert_eq!(a, sample_counts(&dist, shots, seed).unwrap());
    }

    #[test]
    fn padding_idempotent_and_disjoint(n in 2usize..=5, picks in proptest::collection::vec(any::<u64>(), 0..20)) {
        let mut db = Database::new(n).unwrap();
        for p in picks {
            let _ = db.push(Entry::new(BasisKey::new(p % (1 << n), n).unwrap()));
        }
        let once = pad_database(&db);
        prop_assert_eq!(&pad_database(&once), &once);
        prop_assert_eq!(&once.entries()[..db.len()], db.entries());
        prop_assert_eq!(once.len(), db.len().max(1 << (n - 1)));
        for e in &once.entries()[db.len()..] {
            prop_assert!(e.is_padding);
            prop_assert!(!db.contains(&e.key));
        }
    }

    #[test]
    fn oracle_order_invariance(n in 2usize..=4, seed in any::<u64>()) {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut values: Vec<u64> = (0..1 << n).collect();
        values.shuffle(&mut rng);
        let db = Database::from_entries(
            n,
            values[..values.len() / 2].iter().map(|&v| Entry::new(BasisKey::new(v, n).unwrap())),
        ).unwrap();
        let q = QuerySet::single(BasisKey::new(values[values.len() - 1], n).unwrap());
        let oracle = build_cs_oracle(&db, &q).unwrap();
        let mut ops = oracle.ops().to_vec();
        ops.shuffle(&mut rng);
        let shuffled = Circuit::from_ops(n, ops).unwrap();
        prop_assert_eq!(circuit_unitary(&oracle).unwrap(), circuit_unitary(&shuffled).unwrap());
    }

    #[test]
    fn classify_depends_only_on_ratios(scale in 1.0f64..1000.0, which in 0usize..6) {
        // Scaling a distribution (as raw counts would) leaves verdicts unchanged.
        let scenario = qvdb_core::Scenario::ALL[2 + which];
        let report = qvdb_core::run_scenario(scenario, None, 0).unwrap();
        let qvdb_core::ScenarioSetup::ControlledS { queries, .. } = scenario.setup() else { unreachable!() };
        let base = classify(&report.distribution, &queries, 2.0).unwrap();
        let rescaled: Vec<f64> = report.distribution.as_slice().iter().map(|p| p * scale).collect();
        let total: f64 = rescaled.iter().sum();
        let renorm = ProbabilityDistribution::new(rescaled.iter().map(|p| p / total).collect()).unwrap();
        let again = classify(&renorm, &queries, 2.0).unwrap();
        for (a, b) in base.iter().zip(&again) {
            prop_assert_eq!(a.presence, b.presence);
        }
    }
}

#[test]
fn alias_coherence_is_exact() {
    for (alias, theta) in [(Gate::S, FRAC_PI_2), (Gate::Sdg, -FRAC_PI_2), (Gate::Z, PI)] {
        for controls in [
            vec![],
            vec![ControlSpec::negative(1)],
            vec![ControlSpec::positive(1), ControlSpec::positive(2)],
        ] {
            let a = gate_unitary(&GateOp::controlled(alias, 0, controls.clone()), 3).unwrap();
            let b = gate_unitary(&GateOp::controlled(Gate::Phase(theta), 0, controls), 3).unwrap();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn lowering_matches_key_phase_exhaustively() {
    for n in 1..=5usize {
        for value in 0..1u64 << n {
            for theta in [FRAC_PI_2, PI, -0.77] {
                let op = key_phase(BasisKey::new(value, n).unwrap(), theta);
                let direct = gate_unitary(&op, n).unwrap();
                let lowered = circuit_unitary(&lower_key_phase(&op).unwrap()).unwrap();
                assert!(
                    unitary_distance(&direct, &lowered) <= 1e-12,
                    "n={n} key={value}"
                );
            }
        }
    }
}

#[test]
fn key_phase_matrix_examples() {
    for (bits, index) in [("101", 5usize), ("100", 4)] {
        let u = gate_unitary(&key_phase(BasisKey::parse(bits).unwrap(), FRAC_PI_2), 3).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let want = match (r == c, r == index) {
                    (true, true) => Complex64::new(0.0, 1.0),
                    (true, false) => Complex64::new(1.0, 0.0),
                    _ => Complex64::new(0.0, 0.0),
                };
                assert_eq!(u[(r, c)], want);
            }
        }
    }
    let u = gate_unitary(&key_phase(BasisKey::parse("011").unwrap(), 0.0), 3).unwrap();
    assert_eq!(u, qvdb_core::qstate::Unitary::identity(8, 8));
}

#[test]
fn lowering_000_marks_only_index_zero() {
    let op = key_phase(BasisKey::parse("000").unwrap(), PI);
    let frag = lower_key_phase(&op).unwrap();
    assert_eq!(frag.ops()[0], GateOp::x(0));
    assert_eq!(
        frag.ops()[1],
        GateOp::controlled(
            Gate::Phase(PI),
            0,
            vec![ControlSpec::negative(1), ControlSpec::negative(2)]
        )
    );
    let u = circuit_unitary(&frag).unwrap();
    for k in 0..8 {
        let want = if k == 0 { -1.0 } else { 1.0 };
        assert!((u[(k, k)] - Complex64::new(want, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn decomposition_exhaustive_over_polarities() {
    // every control count ≤ 4 and every polarity pattern, registers up to 5 qubits
    for n in 1..=5usize {
        for n_controls in 0..n.min(5) {
            for target in 0..n {
                let others: Vec<usize> = (0..n).filter(|&q| q != target).take(n_controls).collect();
                for pattern in 0..1u32 << n_controls {
                    let controls: Vec<ControlSpec> = others
                        .iter()
                        .enumerate()
                        .map(|(i, &q)| ControlSpec::with_bit(q, pattern >> i & 1 == 1))
                        .collect();
                    for theta in [FRAC_PI_2, PI, 1.234] {
                        let ideal = gate_unitary(
                            &GateOp::controlled(Gate::Phase(theta), target, controls.clone()),
                            n,
                        )
                        .unwrap();
                        let ops = decompose_mc_phase(theta, &controls, target).unwrap();
                        for op in &ops {
                            let GateOp::Gate { gate, controls, .. } = op else {
                                panic!("key phase in decomposition")
                            };
                            assert!(matches!(
                                (gate, controls.len()),
                                (Gate::Phase(_), 0) | (Gate::X, 0) | (Gate::X, 1)
                            ));
                        }
                        let got = circuit_unitary(&Circuit::from_ops(n, ops).unwrap()).unwrap();
                        assert!(
                            unitary_distance(&ideal, &got) <= 1e-10,
                            "n={n} controls={controls:?}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn two_control_cs_is_diag_i() {
    let controls = [ControlSpec::positive(1), ControlSpec::positive(2)];
    let ops = decompose_mc_phase(FRAC_PI_2, &controls, 0).unwrap();
    let u = circuit_unitary(&Circuit::from_ops(3, ops).unwrap()).unwrap();
    for r in 0..8 {
        for c in 0..8 {
            let want = match (r == c, r) {
                (true, 7) => Complex64::new(0.0, 1.0),
                (true, _) => Complex64::new(1.0, 0.0),
                _ => Complex64::new(0.0, 0.0),
            };
            assert!((u[(r, c)] - want).norm() < 1e-10);
        }
    }
}

#[test]
fn one_control_five_gate_identity() {
    let theta = 0.9;
    let ops = decompose_mc_phase(theta, &[ControlSpec::positive(1)], 0).unwrap();
    assert_eq!(ops.len(), 5);
    let u = circuit_unitary(&Circuit::from_ops(2, ops).unwrap()).unwrap();
    let want = [1.0, 1.0, 1.0].map(|x| Complex64::new(x, 0.0));
    for k in 0..3 {
        assert!((u[(k, k)] - want[k]).norm() < 1e-12);
    }
    assert!((u[(3, 3)] - Complex64::from_polar(1.0, theta)).norm() < 1e-12);
}

#[test]
fn oracles_are_diagonal_exhaustively() {
    for n in 1..=4usize {
        let dim = 1u64 << n;
        // every database over the register, one query each
        for mask in 0..1u64 << dim {
            let keys: Vec<BasisKey> = (0..dim)
                .filter(|v| mask >> v & 1 == 1)
                .map(|v| BasisKey::new(v, n).unwrap())
                .collect();
            let cz = circuit_unitary(&build_cz_oracle(n, &keys).unwrap()).unwrap();
            let db = Database::from_entries(n, keys.iter().map(|&k| Entry::new(k))).unwrap();
            let q = QuerySet::single(BasisKey::new(mask % dim, n).unwrap());
            let cs = circuit_unitary(&build_cs_oracle(&db, &q).unwrap()).unwrap();
            for u in [&cz, &cs] {
                for r in 0..dim as usize {
                    for c in 0..dim as usize {
                        if r != c {
                            assert!(u[(r, c)].norm() < 1e-14);
                        }
                    }
                }
            }
            for k in 0..dim as usize {
                let coded = keys.iter().any(|key| key.index() == k);
                let want = if coded { -1.0 } else { 1.0 };
                assert_eq!(cz[(k, k)], Complex64::new(want, 0.0));
            }
        }
    }
}

#[test]
fn shared_key_accumulates_minus_one() {
    let db = Database::from_bits(3, &["111", "101", "110"]).unwrap();
    let q = QuerySet::from_bits(&["101"]).unwrap();
    let u = circuit_unitary(&build_cs_oracle(&db, &q).unwrap()).unwrap();
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let want = [one, one, one, one, one, -one, i, i];
    for k in 0..8 {
        assert_eq!(u[(k, k)], want[k]);
    }

    let q = QuerySet::from_bits(&["100"]).unwrap();
    let u = circuit_unitary(&build_cs_oracle(&db, &q).unwrap()).unwrap();
    let want = [one, one, one, one, i, i, i, i];
    for k in 0..8 {
        assert_eq!(u[(k, k)], want[k]);
    }

    let empty = Database::new(3).unwrap();
    let q = QuerySet::from_bits(&["101"]).unwrap();
    let u = circuit_unitary(&build_cs_oracle(&empty, &q).unwrap()).unwrap();
    for k in 0..8 {
        assert_eq!(u[(k, k)], if k == 5 { i } else { one });
    }
}

#[test]
fn sampling_converges_within_four_sigma() {
    let report = qvdb_core::run_scenario(qvdb_core::Scenario::Fig8, None, 0).unwrap();
    let shots = 1_000_000u64;
    let counts = sample_counts(&report.distribution, shots, 2024).unwrap();
    for (k, p) in report.distribution.as_slice().iter().enumerate() {
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        let freq = counts.frequency(k);
        assert!((freq - p).abs() <= 4.0 * sigma, "bin {k}: {freq} vs {p}");
    }
}

#[test]
fn qasm_is_byte_deterministic() {
    let setup = qvdb_core::Scenario::Fig6.setup();
    let circuit = qvdb_core::build_search_circuit(&setup.oracle().unwrap(), 2).unwrap();
    assert_eq!(
        export_qasm(&circuit).unwrap(),
        export_qasm(&circuit.clone()).unwrap()
    );
}

fn all_subsets_of_size(n: usize, size: usize, limit: usize) -> Vec<Vec<u64>> {
    use rand::{seq::SliceRandom, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64((n * 31 + size) as u64);
    let mut out = Vec::new();
    for _ in 0..limit {
        let mut values: Vec<u64> = (0..1u64 << n).collect();
        values.shuffle(&mut rng);
        values.truncate(size);
        out.push(values);
    }
    out
}

#[test]
fn existing_query_is_strict_maximum() {
    for n in 3..=6usize {
        for size in 1..=1usize << (n - 1) {
            for values in all_subsets_of_size(n, size, 4) {
                let db = Database::from_entries(
                    n,
                    values
                        .iter()
                        .map(|&v| Entry::new(BasisKey::new(v, n).unwrap())),
                )
                .unwrap();
                let q = BasisKey::new(values[0], n).unwrap();
                let report =
                    grover_search(&db, &QuerySet::single(q), &SearchConfig::default()).unwrap();
                let pq = report.distribution.get(q.index());
                for (k, p) in report.distribution.as_slice().iter().enumerate() {
                    if k != q.index() {
                        assert!(pq > *p, "n={n} db={values:?}: p(q)={pq} vs p({k})={p}");
                    }
                }
            }
        }
    }
}

#[test]
fn half_i_phased_register_gives_uniform_output() {
    // db ∪ {q} covers exactly half the register with q ∉ db
    for n in 3..=6usize {
        let half = 1usize << (n - 1);
        for values in all_subsets_of_size(n, half, 6) {
            let db = Database::from_entries(
                n,
                values[1..]
                    .iter()
                    .map(|&v| Entry::new(BasisKey::new(v, n).unwrap())),
            )
            .unwrap();
            let q = QuerySet::single(BasisKey::new(values[0], n).unwrap());
            let report = grover_search(&db, &q, &SearchConfig::default()).unwrap();
            for p in report.distribution.as_slice() {
                assert!((p - 1.0 / (1 << n) as f64).abs() <= 1e-12);
            }
            assert_eq!(report.verdicts[0].presence, Presence::Absent);
        }
    }
}

#[test]
fn cz_capacity_cliff() {
    for n in 3..=6usize {
        let half = 1usize << (n - 1);
        for values in all_subsets_of_size(n, half, 4) {
            let keys: Vec<BasisKey> = values
                .iter()
                .map(|&v| BasisKey::new(v, n).unwrap())
                .collect();
            let full = grover_search_cz(n, &keys, &SearchConfig::default()).unwrap();
            for p in full.distribution.as_slice() {
                assert!((p - 1.0 / (1 << n) as f64).abs() <= 1e-12);
            }
            let under = grover_search_cz(n, &keys[1..], &SearchConfig::default()).unwrap();
            let coded_min = keys[1..]
                .iter()
                .map(|k| under.distribution.get(k.index()))
                .fold(1.0, f64::min);
            let other_max = (0..1usize << n)
                .filter(|k| !keys[1..].iter().any(|key| key.index() == *k))
                .map(|k| under.distribution.get(k))
                .fold(0.0, f64::max);
            assert!(coded_min > other_max, "n={n}");
        }
    }
}
