//! Randomized equivalence suites against the dense-unitary oracle.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{
    build_diffusion, decompose_mc_phase, key_phase, Circuit, ControlSpec, Gate, GateOp,
};
use crate::error::{Error, Result};
use crate::key::BasisKey;
use crate::qasm::{export_qasm, read_emitted};
use crate::qstate::{
    apply_unitary, circuit_unitary, gate_unitary, unitary_distance,
    unitary_distance_up_to_global_phase, StateVector, MAX_DENSE_QUBITS,
};
use crate::vecdb::{build_cs_oracle, Database, QuerySet};

pub const STATEVECTOR_TOL: f64 = 1e-10;
pub const DIFFUSION_TOL: f64 = 1e-12;
pub const DECOMPOSITION_TOL: f64 = 1e-10;
pub const QASM_TOL: f64 = 1e-10;
/// Gates per random circuit.
pub const MAX_RANDOM_GATES: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifySummary {
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

/// Runs every suite with `trials` random cases each on registers of
/// `1..=max_qubits` (2 and up where a suite needs it).
pub fn run_all(max_qubits: usize, trials: usize, seed: u64) -> Result<VerifySummary> {
    if max_qubits == 0 || max_qubits > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "verification register must be in 1..={MAX_DENSE_QUBITS} qubits, got {max_qubits}"
        )));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(VerifySummary {
        suites: vec![
            statevector_vs_dense(&mut rng, max_qubits, trials)?,
            diffusion_vs_reflection(&mut rng, max_qubits, trials)?,
            decomposition_vs_ideal(&mut rng, max_qubits, trials)?,
            oracle_order_invariance(&mut rng, max_qubits, trials)?,
            qasm_round_trip(&mut rng, max_qubits, trials)?,
        ],
    })
}

fn width_for(trial: usize, min: usize, max: usize) -> usize {
    let min = min.min(max);
    min + trial % (max - min + 1)
}

pub fn random_gate(rng: &mut impl Rng, n_qubits: usize) -> GateOp {
    if rng.gen_bool(0.15) {
        let key = BasisKey::new(rng.gen_range(0..1u64 << n_qubits), n_qubits).expect("in range");
        return key_phase(key, rng.gen_range(-PI..PI));
    }
    let gate = match rng.gen_range(0..6) {
        0 => Gate::H,
        1 => Gate::X,
        2 => Gate::Z,
        3 => Gate::S,
        4 => Gate::Sdg,
        _ => Gate::Phase(rng.gen_range(-PI..PI)),
    };
    let mut qubits: Vec<usize> = (0..n_qubits).collect();
    qubits.shuffle(rng);
    let target = qubits[0];
    let n_controls = rng.gen_range(0..n_qubits.min(3));
    let controls = qubits[1..=n_controls]
        .iter()
        .map(|&q| ControlSpec::with_bit(q, rng.gen_bool(0.5)))
        .collect();
    GateOp::controlled(gate, target, controls)
}

pub fn random_circuit(rng: &mut impl Rng, n_qubits: usize, max_gates: usize) -> Circuit {
    let len = rng.gen_range(0..=max_gates);
    Circuit::from_ops(n_qubits, (0..len).map(|_| random_gate(rng, n_qubits))).expect("valid gates")
}

pub fn random_state(rng: &mut impl Rng, n_qubits: usize) -> StateVector {
    let dim = 1usize << n_qubits;
    loop {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
                .expect("normalized");
        }
    }
}

/// Fast kernel vs `circuit_unitary · |s⟩`, componentwise.
fn statevector_vs_dense(rng: &mut ChaCha8Rng, max_n: usize, trials: usize) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for t in 0..trials {
        let n = width_for(t, 1, max_n);
        let circuit = random_circuit(rng, n, MAX_RANDOM_GATES);
        let start = StateVector::uniform(n)?;
        let dense = apply_unitary(&circuit_unitary(&circuit)?, &start)?;
        let mut fast = start;
        fast.apply_circuit(&circuit)?;
        for (a, b) in fast.amplitudes().iter().zip(&dense) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(SuiteResult {
        name: "statevector vs dense unitary",
        trials,
        max_deviation: worst,
        tolerance: STATEVECTOR_TOL,
    })
}

/// Gate-level diffusion vs `a ↦ 2μ − a`, compared on probabilities.
fn diffusion_vs_reflection(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    trials: usize,
) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for t in 0..trials {
        let n = width_for(t, 1, max_n);
        let state = random_state(rng, n);
        let mut gates = state.clone();
        gates.apply_circuit(&build_diffusion(n)?)?;
        let mut analytic = state;
        analytic.reflect_about_mean();
        let (p, q) = (gates.probabilities(), analytic.probabilities());
        for (a, b) in p.as_slice().iter().zip(q.as_slice()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(SuiteResult {
        name: "diffusion gates vs reflection about mean",
        trials,
        max_deviation: worst,
        tolerance: DIFFUSION_TOL,
    })
}

/// Decomposed multi-controlled phase vs the ideal controlled-phase matrix.
fn decomposition_vs_ideal(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    trials: usize,
) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for t in 0..trials {
        let n = width_for(t, 2, max_n.max(2)).min(MAX_DENSE_QUBITS);
        let mut qubits: Vec<usize> = (0..n).collect();
        qubits.shuffle(rng);
        let n_controls = rng.gen_range(0..=(n - 1).min(4));
        let controls: Vec<ControlSpec> = qubits[1..=n_controls]
            .iter()
            .map(|&q| ControlSpec::with_bit(q, rng.gen_bool(0.5)))
            .collect();
        let theta = rng.gen_range(-TAU..TAU);
        let target = qubits[0];
        let ideal = gate_unitary(
            &GateOp::controlled(Gate::Phase(theta), target, controls.clone()),
            n,
        )?;
        let decomposed = Circuit::from_ops(n, decompose_mc_phase(theta, &controls, target)?)?;
        worst = worst.max(unitary_distance(&ideal, &circuit_unitary(&decomposed)?));
    }
    Ok(SuiteResult {
        name: "multi-controlled phase decomposition vs ideal",
        trials,
        max_deviation: worst,
        tolerance: DECOMPOSITION_TOL,
    })
}

/// Shuffled controlled-S oracles must give bit-identical unitaries.
fn oracle_order_invariance(
    rng: &mut ChaCha8Rng,
    max_n: usize,
    trials: usize,
) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for t in 0..trials {
        let n = width_for(t, 2, max_n.max(2));
        let dim = 1u64 << n;
        let mut values: Vec<u64> = (0..dim).collect();
        values.shuffle(rng);
        let db_len = rng.gen_range(0..=dim as usize / 2);
        let db = Database::from_entries(
            n,
            values[..db_len]
                .iter()
                .map(|&v| crate::vecdb::Entry::new(BasisKey::new(v, n).expect("in range"))),
        )?;
        values.shuffle(rng);
        let n_queries = rng.gen_range(1..=2usize);
        let queries = QuerySet::new(
            values[..n_queries]
                .iter()
                .map(|&v| BasisKey::new(v, n).expect("in range"))
                .collect(),
        )?;
        let oracle = build_cs_oracle(&db, &queries)?;
        let mut ops = oracle.ops().to_vec();
        ops.shuffle(rng);
        let shuffled = Circuit::from_ops(n, ops)?;
        let (a, b) = (circuit_unitary(&oracle)?, circuit_unitary(&shuffled)?);
        if a != b {
            worst = worst.max(unitary_distance(&a, &b)).max(f64::MIN_POSITIVE);
        }
    }
    Ok(SuiteResult {
        name: "oracle gate-order invariance (exact)",
        trials,
        max_deviation: worst,
        tolerance: 0.0,
    })
}

/// Emitted QASM read back and compared with the source circuit.
fn qasm_round_trip(rng: &mut ChaCha8Rng, max_n: usize, trials: usize) -> Result<SuiteResult> {
    let mut worst = 0.0f64;
    for t in 0..trials {
        let n = width_for(t, 1, max_n);
        let mut circuit = random_circuit(rng, n, MAX_RANDOM_GATES / 2);
        // controlled H has no whitelisted lowering
        circuit = Circuit::from_ops(
            n,
            circuit.ops().iter().filter(|op| {
                !matches!(op, GateOp::Gate { gate: Gate::H, controls, .. } if !controls.is_empty())
            }).cloned(),
        )?;
        let read = read_emitted(&export_qasm(&circuit)?)?;
        worst = worst.max(unitary_distance_up_to_global_phase(
            &circuit_unitary(&circuit)?,
            &circuit_unitary(&read)?,
        )?);
    }
    Ok(SuiteResult {
        name: "qasm export round trip",
        trials,
        max_deviation: worst,
        tolerance: QASM_TOL,
    })
}
