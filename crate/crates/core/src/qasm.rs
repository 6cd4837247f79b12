//! OpenQASM 2.0 emission.
//!
//! Output uses a fixed gate whitelist (`h x z s sdg u1 cu1 cx`) so it loads on
//! any `qelib1.inc` toolchain. Key phases are lowered onto qubit 0; phases
//! with two or more controls go through [`decompose_mc_phase`].

use std::fmt::Write;

use crate::circuit::{
    decompose_mc_phase, lower_key_phase, Circuit, ControlSpec, Gate, GateOp, Polarity,
};
use crate::error::{Error, Result};

/// Gate names that may appear in emitted programs.
pub const GATE_WHITELIST: [&str; 8] = ["h", "x", "z", "s", "sdg", "u1", "cu1", "cx"];

/// One whitelisted instruction.
#[derive(Debug, Clone, PartialEq)]
pub enum QasmGate {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    U1(f64, usize),
    Cu1(f64, usize, usize),
    Cx(usize, usize),
}

impl QasmGate {
    pub fn render(&self) -> String {
        match *self {
            QasmGate::H(q) => format!("h q[{q}];"),
            QasmGate::X(q) => format!("x q[{q}];"),
            QasmGate::Z(q) => format!("z q[{q}];"),
            QasmGate::S(q) => format!("s q[{q}];"),
            QasmGate::Sdg(q) => format!("sdg q[{q}];"),
            QasmGate::U1(theta, q) => format!("u1({}) q[{q}];", fmt_angle(theta)),
            QasmGate::Cu1(theta, c, t) => format!("cu1({}) q[{c}],q[{t}];", fmt_angle(theta)),
            QasmGate::Cx(c, t) => format!("cx q[{c}],q[{t}];"),
        }
    }

    /// The equivalent circuit operation.
    pub fn to_op(&self) -> GateOp {
        match *self {
            QasmGate::H(q) => GateOp::h(q),
            QasmGate::X(q) => GateOp::x(q),
            QasmGate::Z(q) => GateOp::single(Gate::Z, q),
            QasmGate::S(q) => GateOp::single(Gate::S, q),
            QasmGate::Sdg(q) => GateOp::single(Gate::Sdg, q),
            QasmGate::U1(theta, q) => GateOp::phase(theta, q),
            QasmGate::Cu1(theta, c, t) => {
                GateOp::controlled(Gate::Phase(theta), t, vec![ControlSpec::positive(c)])
            }
            QasmGate::Cx(c, t) => GateOp::cx(c, t),
        }
    }
}

fn fmt_angle(theta: f64) -> String {
    // Shortest round-trip representation; `-0` is normalized.
    if theta == 0.0 {
        "0".to_string()
    } else {
        format!("{theta:?}")
    }
}

/// Lowers a circuit to the whitelisted instruction set.
pub fn lower_to_qasm_gates(circuit: &Circuit) -> Result<Vec<QasmGate>> {
    let mut out = Vec::new();
    for op in circuit.ops() {
        match op {
            GateOp::KeyPhase { .. } => {
                for inner in lower_key_phase(op)?.ops() {
                    lower_gate(inner, &mut out)?;
                }
            }
            GateOp::Gate { .. } => lower_gate(op, &mut out)?,
        }
    }
    Ok(out)
}

fn lower_gate(op: &GateOp, out: &mut Vec<QasmGate>) -> Result<()> {
    let GateOp::Gate {
        gate,
        target,
        controls,
    } = op
    else {
        unreachable!("key phases are lowered before this point");
    };
    let target = *target;

    if controls.is_empty() {
        out.push(match *gate {
            Gate::H => QasmGate::H(target),
            Gate::X => QasmGate::X(target),
            Gate::Z => QasmGate::Z(target),
            Gate::S => QasmGate::S(target),
            Gate::Sdg => QasmGate::Sdg(target),
            Gate::Phase(theta) => QasmGate::U1(theta, target),
        });
        return Ok(());
    }

    match *gate {
        Gate::H => Err(Error::UnsupportedGate(format!(
            "controlled h on q[{target}] has no whitelisted lowering"
        ))),
        Gate::X if controls.len() == 1 => with_flips(controls, out, |out| {
            out.push(QasmGate::Cx(controls[0].qubit, target));
            Ok(())
        }),
        Gate::X => {
            // X = H·Z·H on the target.
            out.push(QasmGate::H(target));
            lower_controlled_phase(std::f64::consts::PI, controls, target, out)?;
            out.push(QasmGate::H(target));
            Ok(())
        }
        _ => {
            let theta = gate.phase_angle().expect("diagonal gate");
            lower_controlled_phase(theta, controls, target, out)
        }
    }
}

fn with_flips(
    controls: &[ControlSpec],
    out: &mut Vec<QasmGate>,
    body: impl FnOnce(&mut Vec<QasmGate>) -> Result<()>,
) -> Result<()> {
    let flips: Vec<usize> = controls
        .iter()
        .filter(|c| c.polarity == Polarity::Negative)
        .map(|c| c.qubit)
        .collect();
    out.extend(flips.iter().map(|&q| QasmGate::X(q)));
    body(out)?;
    out.extend(flips.iter().map(|&q| QasmGate::X(q)));
    Ok(())
}

fn lower_controlled_phase(
    theta: f64,
    controls: &[ControlSpec],
    target: usize,
    out: &mut Vec<QasmGate>,
) -> Result<()> {
    if controls.len() == 1 {
        return with_flips(controls, out, |out| {
            out.push(QasmGate::Cu1(theta, controls[0].qubit, target));
            Ok(())
        });
    }
    for op in decompose_mc_phase(theta, controls, target)? {
        match op {
            GateOp::Gate {
                gate: Gate::Phase(angle),
                target,
                ref controls,
            } if controls.is_empty() => out.push(QasmGate::U1(angle, target)),
            GateOp::Gate {
                gate: Gate::X,
                target,
                ref controls,
            } if controls.is_empty() => out.push(QasmGate::X(target)),
            GateOp::Gate {
                gate: Gate::X,
                target,
                ref controls,
            } if controls.len() == 1 && controls[0].polarity == Polarity::Positive => {
                out.push(QasmGate::Cx(controls[0].qubit, target))
            }
            other => {
                return Err(Error::UnsupportedGate(format!(
                    "decomposition produced {other:?}"
                )))
            }
        }
    }
    Ok(())
}

/// Renders a complete OpenQASM 2.0 program ending in per-qubit measurement.
pub fn export_qasm(circuit: &Circuit) -> Result<String> {
    let gates = lower_to_qasm_gates(circuit)?;
    let n = circuit.n_qubits();
    let mut text = String::new();
    text.push_str("OPENQASM 2.0;\n");
    text.push_str("include \"qelib1.inc\";\n");
    let _ = writeln!(text, "qreg q[{n}];");
    let _ = writeln!(text, "creg c[{n}];");
    for g in &gates {
        text.push_str(&g.render());
        text.push('\n');
    }
    for q in 0..n {
        let _ = writeln!(text, "measure q[{q}] -> c[{q}];");
    }
    Ok(text)
}

/// Reads back the gate section of a program written by [`export_qasm`].
///
/// Only the whitelisted single-line forms this module emits are understood;
/// this is a round-trip checker, not a general OpenQASM parser.
pub fn read_emitted(text: &str) -> Result<Circuit> {
    let mut n_qubits = None;
    let mut gates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let bad = || Error::InvalidArgument(format!("line {}: cannot read {line:?}", lineno + 1));
        if line.is_empty()
            || line.starts_with("OPENQASM")
            || line.starts_with("include")
            || line.starts_with("creg")
            || line.starts_with("measure")
            || line.starts_with("//")
        {
            continue;
        }
        let body = line.strip_suffix(';').ok_or_else(bad)?;
        if let Some(rest) = body.strip_prefix("qreg q[") {
            let n: usize = rest
                .strip_suffix(']')
                .and_then(|s| s.parse().ok())
                .ok_or_else(bad)?;
            n_qubits = Some(n);
            continue;
        }
        let (head, args) = body.split_once(' ').ok_or_else(bad)?;
        let (name, angle) = match head.split_once('(') {
            Some((name, rest)) => {
                let a: f64 = rest
                    .strip_suffix(')')
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(bad)?;
                (name, Some(a))
            }
            None => (head, None),
        };
        let qubits: Vec<usize> = args
            .split(',')
            .map(|a| {
                a.trim()
                    .strip_prefix("q[")
                    .and_then(|s| s.strip_suffix(']'))
                    .and_then(|s| s.parse().ok())
            })
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        let gate = match (name, angle, qubits.as_slice()) {
            ("h", None, &[q]) => QasmGate::H(q),
            ("x", None, &[q]) => QasmGate::X(q),
            ("z", None, &[q]) => QasmGate::Z(q),
            ("s", None, &[q]) => QasmGate::S(q),
            ("sdg", None, &[q]) => QasmGate::Sdg(q),
            ("u1", Some(a), &[q]) => QasmGate::U1(a, q),
            ("cu1", Some(a), &[c, t]) => QasmGate::Cu1(a, c, t),
            ("cx", None, &[c, t]) => QasmGate::Cx(c, t),
            _ => return Err(bad()),
        };
        gates.push(gate);
    }
    let n = n_qubits.ok_or_else(|| Error::InvalidArgument("missing qreg declaration".into()))?;
    Circuit::from_ops(n, gates.iter().map(QasmGate::to_op))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;
    use crate::circuit::key_phase;
    use crate::key::BasisKey;

    #[test]
    fn empty_circuit() {
        let text = export_qasm(&Circuit::new(1).unwrap()).unwrap();
        assert_eq!(
            text,
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\ncreg c[1];\nmeasure q[0] -> c[0];\n"
        );
    }

    #[test]
    fn single_hadamard() {
        let c = Circuit::from_ops(1, [GateOp::h(0)]).unwrap();
        let text = export_qasm(&c).unwrap();
        assert_eq!(text.matches("h q[0];").count(), 1);
        let h = text.find("h q[0];").unwrap();
        let m = text.find("measure").unwrap();
        assert!(h < m);
    }

    #[test]
    fn controlled_hadamard_is_rejected() {
        let c = Circuit::from_ops(
            2,
            [GateOp::controlled(
                Gate::H,
                0,
                vec![ControlSpec::positive(1)],
            )],
        )
        .unwrap();
        assert!(matches!(export_qasm(&c), Err(Error::UnsupportedGate(_))));
    }

    #[test]
    fn only_whitelisted_names() {
        let mut c = Circuit::new(3).unwrap();
        c.push(key_phase(BasisKey::parse("010").unwrap(), FRAC_PI_2))
            .unwrap();
        c.push(GateOp::controlled(
            Gate::X,
            2,
            vec![ControlSpec::negative(0), ControlSpec::positive(1)],
        ))
        .unwrap();
        c.push(GateOp::controlled(
            Gate::Sdg,
            1,
            vec![ControlSpec::negative(0)],
        ))
        .unwrap();
        let text = export_qasm(&c).unwrap();
        for line in text.lines().skip(4) {
            if line.starts_with("measure") {
                continue;
            }
            let name = line.split([' ', '(']).next().unwrap();
            assert!(GATE_WHITELIST.contains(&name), "{line}");
        }
    }

    #[test]
    fn read_back_matches_lowering() {
        let mut c = Circuit::new(3).unwrap();
        c.push(key_phase(BasisKey::parse("110").unwrap(), FRAC_PI_2))
            .unwrap();
        let lowered = lower_to_qasm_gates(&c).unwrap();
        let read = read_emitted(&export_qasm(&c).unwrap()).unwrap();
        assert_eq!(read.n_qubits(), 3);
        let expected: Vec<GateOp> = lowered.iter().map(QasmGate::to_op).collect();
        assert_eq!(read.ops(), expected.as_slice());
    }

    #[test]
    fn read_rejects_foreign_gates() {
        let text = "OPENQASM 2.0;\nqreg q[2];\nccx q[0],q[1];\n";
        assert!(read_emitted(text).is_err());
    }
}
