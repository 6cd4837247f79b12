//! Dense statevector simulation, the brute-force unitary oracle and seeded
//! shot sampling.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{control_masks, phase_factor, Circuit, GateOp};
use crate::error::{Error, Result};

/// Largest register the statevector simulator accepts.
pub const MAX_QUBITS: usize = 24;

/// Largest register `circuit_unitary` will materialize.
pub const MAX_DENSE_QUBITS: usize = 10;

pub type Unitary = DMatrix<Complex64>;

/// `2^n` complex amplitudes; basis index `k` is the key whose integer value
/// is `k` (qubit 0 is the least significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::InvalidArgument(format!(
            "register width must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// Uniform superposition `|s⟩`, every amplitude `1/√(2^n)`.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            n_qubits,
            amplitudes: vec![amp; dim],
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two and the
    /// vector normalized to within 1e-9.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_width(n_qubits)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "state is not normalized (norm² = {norm})"
            )));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies one operation in place.
    pub fn apply(&mut self, op: &GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        match op {
            GateOp::KeyPhase { key, theta } => {
                self.amplitudes[key.index()] *= phase_factor(*theta);
            }
            GateOp::Gate {
                gate,
                target,
                controls,
            } => {
                let (mask, want) = control_masks(controls);
                let tbit = 1usize << target;
                let amps = &mut self.amplitudes;
                if let Some(theta) = gate.phase_angle() {
                    let f = phase_factor(theta);
                    for (i, a) in amps.iter_mut().enumerate() {
                        if i & tbit != 0 && i & mask == want {
                            *a *= f;
                        }
                    }
                } else {
                    let [[m00, m01], [m10, m11]] = gate.matrix();
                    let dim = amps.len();
                    for block in (0..dim).step_by(tbit << 1) {
                        for i in block..block + tbit {
                            if i & mask != want {
                                continue;
                            }
                            let j = i | tbit;
                            let (a, b) = (amps[i], amps[j]);
                            amps[i] = m00 * a + m01 * b;
                            amps[j] = m10 * a + m11 * b;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::WidthMismatch {
                expected: self.n_qubits,
                found: circuit.n_qubits(),
            });
        }
        circuit.ops().iter().try_for_each(|op| self.apply(op))
    }

    /// Inversion about the mean: `a ↦ 2μ − a` with `μ` the mean amplitude.
    ///
    /// This is `(2|s⟩⟨s| − I)`, the gate-level diffusion block without its
    /// −1 global phase.
    pub fn reflect_about_mean(&mut self) {
        let dim = self.amplitudes.len() as f64;
        let mean = self.amplitudes.iter().sum::<Complex64>() / dim;
        let twice = mean * 2.0;
        for a in &mut self.amplitudes {
            *a = twice - *a;
        }
    }

    pub fn probabilities(&self) -> ProbabilityDistribution {
        ProbabilityDistribution {
            n_qubits: self.n_qubits,
            probabilities: self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::WidthMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

pub fn init_uniform(n_qubits: usize) -> Result<StateVector> {
    StateVector::uniform(n_qubits)
}

pub fn apply_gate(mut state: StateVector, op: &GateOp) -> Result<StateVector> {
    state.apply(op)?;
    Ok(state)
}

pub fn apply_circuit(mut state: StateVector, circuit: &Circuit) -> Result<StateVector> {
    state.apply_circuit(circuit)?;
    Ok(state)
}

pub fn reflect_about_mean(mut state: StateVector) -> StateVector {
    state.reflect_about_mean();
    state
}

pub fn probabilities(state: &StateVector) -> ProbabilityDistribution {
    state.probabilities()
}

/// `1 − |⟨a|b⟩|`: zero iff the states agree up to a global phase.
pub fn state_distance_up_to_global_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok((1.0 - a.inner(b)?.norm()).max(0.0))
}

/// Measurement outcome probabilities indexed by basis-state integer.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    n_qubits: usize,
    probabilities: Vec<f64>,
}

impl ProbabilityDistribution {
    /// Accepts any non-negative vector of length `2^n` summing to 1 within 1e-9.
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        let dim = probabilities.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "distribution length {dim} is not a power of two >= 2"
            )));
        }
        if probabilities.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidArgument(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            probabilities,
        })
    }

    /// Empirical frequencies of sampled counts.
    pub fn from_counts(counts: &ShotCounts) -> Self {
        let shots = counts.shots as f64;
        Self {
            n_qubits: counts.n_qubits,
            probabilities: counts.counts.iter().map(|&c| c as f64 / shots).collect(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn get(&self, index: usize) -> f64 {
        self.probabilities[index]
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Sampled measurement outcomes; `counts[k]` is the tally of basis state `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotCounts {
    n_qubits: usize,
    shots: u64,
    counts: Vec<u64>,
}

impl ShotCounts {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, index: usize) -> u64 {
        self.counts[index]
    }

    pub fn frequency(&self, index: usize) -> f64 {
        self.counts[index] as f64 / self.shots as f64
    }
}

/// Draws `shots` independent outcomes from `dist`.
///
/// The generator is ChaCha8 seeded with `seed_from_u64(seed)`; each shot
/// consumes one uniform `f64` in `[0, 1)` and selects its bin by inverse CDF.
pub fn sample_counts(dist: &ProbabilityDistribution, shots: u64, seed: u64) -> Result<ShotCounts> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let mut cumulative = Vec::with_capacity(dist.len());
    let mut running = 0.0;
    for p in dist.as_slice() {
        running += p;
        cumulative.push(running);
    }
    let last_nonzero = dist
        .as_slice()
        .iter()
        .rposition(|&p| p > 0.0)
        .ok_or_else(|| Error::InvalidArgument("distribution has no support".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.len()];
    for _ in 0..shots {
        let u = rng.gen::<f64>() * running;
        let bin = cumulative.partition_point(|&c| c <= u).min(last_nonzero);
        counts[bin] += 1;
    }
    Ok(ShotCounts {
        n_qubits: dist.n_qubits(),
        shots,
        counts,
    })
}

/// Full `2^n × 2^n` matrix of one operation, built entry by entry from its
/// definition.
pub fn gate_unitary(op: &GateOp, n_qubits: usize) -> Result<Unitary> {
    check_dense(n_qubits)?;
    op.validate(n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut m = Unitary::zeros(dim, dim);
    match op {
        GateOp::KeyPhase { key, theta } => {
            for k in 0..dim {
                m[(k, k)] = if k == key.index() {
                    phase_factor(*theta)
                } else {
                    Complex64::new(1.0, 0.0)
                };
            }
        }
        GateOp::Gate {
            gate,
            target,
            controls,
        } => {
            let u = gate.matrix();
            let tbit = 1usize << target;
            let fires = |col: usize| {
                controls.iter().all(|c| {
                    let bit = (col >> c.qubit) & 1 == 1;
                    bit == (c.polarity == crate::circuit::Polarity::Positive)
                })
            };
            for col in 0..dim {
                if !fires(col) {
                    m[(col, col)] = Complex64::new(1.0, 0.0);
                    continue;
                }
                let col_bit = (col >> target) & 1;
                for (row_bit, row_entries) in u.iter().enumerate() {
                    let row = (col & !tbit) | (row_bit << target);
                    m[(row, col)] = row_entries[col_bit];
                }
            }
        }
    }
    Ok(m)
}

fn check_dense(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_DENSE_QUBITS {
        return Err(Error::ResourceLimit(format!(
            "dense unitaries are limited to {MAX_DENSE_QUBITS} qubits, got {n_qubits}"
        )));
    }
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("register width must be >= 1".into()));
    }
    Ok(())
}

/// `G · acc` where `G` has at most two non-zeros per row.
fn left_multiply_sparse(gate: &Unitary, acc: &Unitary) -> Unitary {
    let dim = gate.nrows();
    let mut out = Unitary::zeros(dim, acc.ncols());
    for r in 0..dim {
        for k in 0..dim {
            let g = gate[(r, k)];
            if g.re == 0.0 && g.im == 0.0 {
                continue;
            }
            for c in 0..acc.ncols() {
                out[(r, c)] += g * acc[(k, c)];
            }
        }
    }
    out
}

/// Product of the per-gate unitaries in application order (dense oracle).
pub fn circuit_unitary(circuit: &Circuit) -> Result<Unitary> {
    let n = circuit.n_qubits();
    check_dense(n)?;
    let dim = 1usize << n;
    let mut acc = Unitary::identity(dim, dim);
    for op in circuit.ops() {
        let g = gate_unitary(op, n)?;
        acc = left_multiply_sparse(&g, &acc);
    }
    Ok(acc)
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_deviation(u: &Unitary) -> f64 {
    let prod = u.adjoint() * u;
    let dim = prod.nrows();
    let mut worst = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let expected = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((prod[(r, c)] - Complex64::new(expected, 0.0)).norm());
        }
    }
    worst
}

/// Largest entrywise deviation `max |e^{iφ}·a − b|` after aligning the global
/// phase `φ` through `tr(a†b)`.
pub fn unitary_distance_up_to_global_phase(a: &Unitary, b: &Unitary) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::InvalidArgument(format!(
            "matrix shapes differ: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    let overlap: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 1e-12 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x * phase - y).norm())
        .fold(0.0, f64::max))
}

/// Largest entrywise deviation `max |a − b|`.
pub fn unitary_distance(a: &Unitary, b: &Unitary) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `U · v` for a state vector.
pub fn apply_unitary(u: &Unitary, state: &StateVector) -> Result<Vec<Complex64>> {
    if u.ncols() != state.dim() {
        return Err(Error::InvalidArgument(format!(
            "matrix of size {} does not act on a state of dimension {}",
            u.ncols(),
            state.dim()
        )));
    }
    Ok((0..u.nrows())
        .map(|r| {
            state
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(c, a)| u[(r, c)] * a)
                .sum()
        })
        .collect())
}
