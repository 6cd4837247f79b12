//! Gate and circuit data model plus the circuit builders used by the search
//! pipeline: key-conditioned phases, their lowering to controlled phase
//! gates, the diffusion ("Amp") block and ancilla-free multi-controlled
//! phase decomposition.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::key::BasisKey;

/// Largest number of controls `decompose_mc_phase` accepts (register of 10).
pub const MAX_DECOMPOSED_CONTROLS: usize = 9;

/// Named single-qubit gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    H,
    X,
    Z,
    S,
    Sdg,
    /// `diag(1, e^{iθ})`, radians.
    Phase(f64),
}

impl Gate {
    /// Phase angle of a diagonal gate, `None` for H and X.
    pub fn phase_angle(&self) -> Option<f64> {
        match *self {
            Gate::Z => Some(PI),
            Gate::S => Some(FRAC_PI_2),
            Gate::Sdg => Some(-FRAC_PI_2),
            Gate::Phase(theta) => Some(theta),
            Gate::H | Gate::X => None,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.phase_angle().is_some()
    }

    /// Row-major 2×2 matrix.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        match self {
            Gate::H => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            Gate::X => [[zero, one], [one, zero]],
            _ => {
                let theta = self.phase_angle().expect("diagonal gate");
                [[one, zero], [zero, phase_factor(theta)]]
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H => "h",
            Gate::X => "x",
            Gate::Z => "z",
            Gate::S => "s",
            Gate::Sdg => "sdg",
            Gate::Phase(_) => "p",
        }
    }
}

/// `e^{iθ}`, exact for integer multiples of π/2 so that S·S == Z bit for bit.
pub fn phase_factor(theta: f64) -> Complex64 {
    let quarter_turns = theta / FRAC_PI_2;
    if quarter_turns.fract() == 0.0 && quarter_turns.abs() < 1e15 {
        match (quarter_turns as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Fires when the control qubit is `1`.
    Positive,
    /// Anti-control: fires when the control qubit is `0`.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ControlSpec {
    pub qubit: usize,
    pub polarity: Polarity,
}

impl ControlSpec {
    pub fn positive(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Positive,
        }
    }

    pub fn negative(qubit: usize) -> Self {
        Self {
            qubit,
            polarity: Polarity::Negative,
        }
    }

    pub fn with_bit(qubit: usize, bit: bool) -> Self {
        if bit {
            Self::positive(qubit)
        } else {
            Self::negative(qubit)
        }
    }
}

/// Bit masks `(mask, expected)` such that an amplitude index `i` satisfies
/// the controls iff `i & mask == expected`.
pub fn control_masks(controls: &[ControlSpec]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(mask, want), c| {
        let bit = 1usize << c.qubit;
        match c.polarity {
            Polarity::Positive => (mask | bit, want | bit),
            Polarity::Negative => (mask | bit, want),
        }
    })
}

/// One circuit operation.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    /// A single-qubit gate with zero or more polarity-tagged controls.
    Gate {
        gate: Gate,
        target: usize,
        controls: Vec<ControlSpec>,
    },
    /// Multiplies the amplitude of exactly one basis state by `e^{iθ}`.
    KeyPhase { key: BasisKey, theta: f64 },
}

impl GateOp {
    pub fn single(gate: Gate, target: usize) -> Self {
        GateOp::Gate {
            gate,
            target,
            controls: Vec::new(),
        }
    }

    pub fn controlled(gate: Gate, target: usize, controls: Vec<ControlSpec>) -> Self {
        GateOp::Gate {
            gate,
            target,
            controls,
        }
    }

    pub fn h(target: usize) -> Self {
        Self::single(Gate::H, target)
    }

    pub fn x(target: usize) -> Self {
        Self::single(Gate::X, target)
    }

    pub fn phase(theta: f64, target: usize) -> Self {
        Self::single(Gate::Phase(theta), target)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::controlled(Gate::X, target, vec![ControlSpec::positive(control)])
    }

    /// Checks qubit indices against a register of `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match self {
            GateOp::Gate {
                target, controls, ..
            } => {
                if *target >= n_qubits {
                    return Err(Error::QubitOutOfRange {
                        qubit: *target,
                        n_qubits,
                    });
                }
                let mut seen = 1usize << target;
                for c in controls {
                    if c.qubit >= n_qubits {
                        return Err(Error::QubitOutOfRange {
                            qubit: c.qubit,
                            n_qubits,
                        });
                    }
                    if seen & (1 << c.qubit) != 0 {
                        return Err(Error::DuplicateQubit(c.qubit));
                    }
                    seen |= 1 << c.qubit;
                }
                Ok(())
            }
            GateOp::KeyPhase { key, .. } => key.expect_width(n_qubits),
        }
    }
}

/// A qubit count and an ordered list of operations.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > crate::key::MAX_KEY_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "circuit width must be in 1..={}, got {n_qubits}",
                crate::key::MAX_KEY_WIDTH
            )));
        }
        Ok(Self {
            n_qubits,
            ops: Vec::new(),
        })
    }

    pub fn from_ops(n_qubits: usize, ops: impl IntoIterator<Item = GateOp>) -> Result<Self> {
        let mut circuit = Self::new(n_qubits)?;
        for op in ops {
            circuit.push(op)?;
        }
        Ok(circuit)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::WidthMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        self.ops.extend(other.ops.iter().cloned());
        Ok(())
    }

    /// Applies `gate` to every qubit in ascending order.
    pub fn push_layer(&mut self, gate: Gate) {
        for q in 0..self.n_qubits {
            self.ops.push(GateOp::single(gate, q));
        }
    }
}

/// Diagonal phase `e^{iθ}` on the single basis state `key`.
pub fn key_phase(key: BasisKey, theta: f64) -> GateOp {
    GateOp::KeyPhase { key, theta }
}

/// Rewrites a key phase as a phase gate on qubit 0 controlled by every other
/// qubit, with an X sandwich on qubit 0 when its key bit is `0`.
pub fn lower_key_phase(op: &GateOp) -> Result<Circuit> {
    let GateOp::KeyPhase { key, theta } = op else {
        return Err(Error::InvalidArgument(
            "lower_key_phase expects a KeyPhase operation".into(),
        ));
    };
    let n = key.width();
    let controls = (1..n)
        .map(|q| ControlSpec::with_bit(q, key.bit(q)))
        .collect();
    let flip = !key.bit(0);

    let mut fragment = Circuit::new(n)?;
    if flip {
        fragment.push(GateOp::x(0))?;
    }
    fragment.push(GateOp::controlled(Gate::Phase(*theta), 0, controls))?;
    if flip {
        fragment.push(GateOp::x(0))?;
    }
    Ok(fragment)
}

/// The Grover diffusion block: `H^n X^n CZ(all) X^n H^n`.
///
/// Its unitary is `I − 2|s⟩⟨s|`, i.e. the reflection about the uniform state
/// `|s⟩` times a global phase of −1.
pub fn build_diffusion(n_qubits: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n_qubits)?;
    c.push_layer(Gate::H);
    c.push_layer(Gate::X);
    c.push(key_phase(BasisKey::all_ones(n_qubits)?, PI))?;
    c.push_layer(Gate::X);
    c.push_layer(Gate::H);
    Ok(c)
}

/// Ancilla-free decomposition of a multi-controlled `Phase(θ)` into
/// single-qubit phases, CX and X gates.
///
/// Anti-controls become X sandwiches. For `k` positive controls the phase on
/// the all-ones state of the `m = k + 1` involved qubits is split by
/// `AND(x) = 2^{1-m} Σ_{S≠∅} (-1)^{|S|+1} parity_S(x)`: every non-empty
/// subset `S` (visited in Gray-code order) gets its parity folded onto one
/// member with CX gates, a `Phase(±θ/2^{m-1})` there, and the CX gates undone.
pub fn decompose_mc_phase(
    theta: f64,
    controls: &[ControlSpec],
    target: usize,
) -> Result<Vec<GateOp>> {
    if controls.len() > MAX_DECOMPOSED_CONTROLS {
        return Err(Error::ResourceLimit(format!(
            "multi-controlled phase decomposition supports at most {MAX_DECOMPOSED_CONTROLS} controls, got {}",
            controls.len()
        )));
    }
    let mut seen = 1usize << target;
    for c in controls {
        if seen & (1 << c.qubit) != 0 {
            return Err(Error::DuplicateQubit(c.qubit));
        }
        seen |= 1 << c.qubit;
    }

    let flips: Vec<GateOp> = controls
        .iter()
        .filter(|c| c.polarity == Polarity::Negative)
        .map(|c| GateOp::x(c.qubit))
        .collect();

    let mut ops = flips.clone();
    if controls.is_empty() {
        ops.push(GateOp::phase(theta, target));
    } else {
        // Bit j of a subset mask selects qubits[j]; the target is last.
        let qubits: Vec<usize> = controls
            .iter()
            .map(|c| c.qubit)
            .chain(std::iter::once(target))
            .collect();
        let m = qubits.len();
        let angle = theta / (1u64 << (m - 1)) as f64;
        let target_bit = 1usize << (m - 1);

        for i in 1..(1usize << m) {
            let subset = i ^ (i >> 1);
            let members: Vec<usize> = (0..m)
                .filter(|j| subset & (1 << j) != 0)
                .map(|j| qubits[j])
                .collect();
            let acc = if subset & target_bit != 0 {
                target
            } else {
                *members.last().expect("non-empty subset")
            };
            let sign = if members.len() % 2 == 1 { 1.0 } else { -1.0 };

            let fold: Vec<GateOp> = members
                .iter()
                .filter(|&&q| q != acc)
                .map(|&q| GateOp::cx(q, acc))
                .collect();
            ops.extend(fold.iter().cloned());
            ops.push(GateOp::phase(sign * angle, acc));
            ops.extend(fold.into_iter().rev());
        }
    }
    ops.extend(flips);
    Ok(ops)
}
