//! OpenQASM 2.0 export and import over the gate dialect
//! {x, h, ry, cx, swap, ccx}.
//!
//! Controlled blocks are decomposed exactly: negative controls become X
//! frames, multi-controlled rotations use the standard halving recursion
//! (CRy(t/2) / MCX / CRy(-t/2) / MCX / shorter MCRy), controlled Hadamards
//! are Ry-conjugated multi-controlled X, and multi-controlled X with three
//! or more controls splits recursively through a borrowed (dirty) wire. A
//! multi-controlled X acting on every wire of the register has determinant
//! -1 while all dialect gates have +1 at that size, so when no spare wire
//! exists the exporter appends one ancilla qubit and records it in the
//! layout comment.
//!
//! The variable layout is annotated in comments and recovered on import, so
//! an exported circuit re-simulates to the same marginal distribution.

use qcopula::{Circuit, Gate, Layout};
use std::f64::consts::FRAC_PI_4;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QasmError {
    #[error("QASM parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported gate '{0}'")]
    UnsupportedGate(String),
    #[error("qubit reference out of range on line {0}")]
    QubitRange(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Op {
    X(usize),
    H(usize),
    Ry(usize, f64),
    Cx(usize, usize),
    Swap(usize, usize),
    Ccx(usize, usize, usize),
}

struct NeedAncilla;

struct Emitter {
    ops: Vec<Op>,
    num_wires: usize,
}

impl Emitter {
    fn free_wire(&self, used: &[usize]) -> Option<usize> {
        (0..self.num_wires).find(|w| !used.contains(w))
    }

    fn emit_gate(&mut self, gate: &Gate, controls: &[usize]) -> Result<(), NeedAncilla> {
        match gate {
            Gate::X { target } => self.mcx(controls, *target),
            Gate::H { target } => {
                if controls.is_empty() {
                    self.ops.push(Op::H(*target));
                    Ok(())
                } else {
                    // H = Ry(-pi/4) X Ry(pi/4)
                    self.ops.push(Op::Ry(*target, FRAC_PI_4));
                    self.mcx(controls, *target)?;
                    self.ops.push(Op::Ry(*target, -FRAC_PI_4));
                    Ok(())
                }
            }
            Gate::Ry { target, angle } => self.mcry(controls, *target, *angle),
            Gate::Cnot { control, target } => {
                let mut all = controls.to_vec();
                all.push(*control);
                self.mcx(&all, *target)
            }
            Gate::Swap { a, b } => {
                if controls.is_empty() {
                    self.ops.push(Op::Swap(*a, *b));
                    Ok(())
                } else {
                    // Fredkin form: only the middle X needs the controls
                    self.ops.push(Op::Cx(*b, *a));
                    let mut all = controls.to_vec();
                    all.push(*a);
                    self.mcx(&all, *b)?;
                    self.ops.push(Op::Cx(*b, *a));
                    Ok(())
                }
            }
            Gate::Block {
                controls: block_controls,
                body,
            } => {
                let negatives: Vec<usize> = block_controls
                    .iter()
                    .filter(|(_, bit)| !bit)
                    .map(|(q, _)| *q)
                    .collect();
                for &q in &negatives {
                    self.ops.push(Op::X(q));
                }
                let mut all = controls.to_vec();
                all.extend(block_controls.iter().map(|(q, _)| *q));
                for g in body {
                    self.emit_gate(g, &all)?;
                }
                for &q in &negatives {
                    self.ops.push(Op::X(q));
                }
                Ok(())
            }
        }
    }

    fn mcx(&mut self, controls: &[usize], target: usize) -> Result<(), NeedAncilla> {
        match controls.len() {
            0 => self.ops.push(Op::X(target)),
            1 => self.ops.push(Op::Cx(controls[0], target)),
            2 => self.ops.push(Op::Ccx(controls[0], controls[1], target)),
            n => {
                let mut used = controls.to_vec();
                used.push(target);
                let spare = self.free_wire(&used).ok_or(NeedAncilla)?;
                let m1 = n.div_ceil(2);
                let (first, second) = controls.split_at(m1);
                let mut upper = second.to_vec();
                upper.push(spare);
                for _ in 0..2 {
                    self.mcx(&upper, target)?;
                    self.mcx(first, spare)?;
                }
            }
        }
        Ok(())
    }

    fn mcry(&mut self, controls: &[usize], target: usize, angle: f64) -> Result<(), NeedAncilla> {
        match controls.len() {
            0 => self.ops.push(Op::Ry(target, angle)),
            1 => {
                let c = controls[0];
                self.ops.push(Op::Ry(target, angle / 2.0));
                self.ops.push(Op::Cx(c, target));
                self.ops.push(Op::Ry(target, -angle / 2.0));
                self.ops.push(Op::Cx(c, target));
            }
            n => {
                let (rest, last) = controls.split_at(n - 1);
                let pivot = last[0];
                self.mcry(last, target, angle / 2.0)?;
                self.mcx(rest, pivot)?;
                self.mcry(last, target, -angle / 2.0)?;
                self.mcx(rest, pivot)?;
                self.mcry(rest, target, angle / 2.0)?;
            }
        }
        Ok(())
    }
}

fn emit_all(circuit: &Circuit, num_wires: usize) -> Result<Vec<Op>, NeedAncilla> {
    let mut emitter = Emitter {
        ops: Vec::new(),
        num_wires,
    };
    for gate in &circuit.gates {
        emitter.emit_gate(gate, &[])?;
    }
    Ok(emitter.ops)
}

/// Serializes a circuit to OpenQASM 2.0. Returns the text and a flag telling
/// whether a decomposition ancilla was appended to the register.
pub fn to_qasm(circuit: &Circuit) -> (String, bool) {
    let (ops, ancilla_added) = match emit_all(circuit, circuit.num_qubits) {
        Ok(ops) => (ops, false),
        Err(NeedAncilla) => {
            let ops = emit_all(circuit, circuit.num_qubits + 1)
                .unwrap_or_else(|_| unreachable!("one spare wire always suffices"));
            (ops, true)
        }
    };
    let num_wires = circuit.num_qubits + usize::from(ancilla_added);
    let mut controls = circuit.layout.controls.clone();
    if ancilla_added {
        controls.push(circuit.num_qubits);
    }
    let mut text = String::new();
    text.push_str("OPENQASM 2.0;\n");
    text.push_str("include \"qelib1.inc\";\n");
    text.push_str(&format!(
        "// layout-variables: {}\n",
        serde_json::to_string(&circuit.layout.variables).unwrap()
    ));
    text.push_str(&format!(
        "// layout-controls: {}\n",
        serde_json::to_string(&controls).unwrap()
    ));
    text.push_str(&format!("qreg q[{num_wires}];\n"));
    for op in &ops {
        let line = match op {
            Op::X(t) => format!("x q[{t}];"),
            Op::H(t) => format!("h q[{t}];"),
            Op::Ry(t, angle) => format!("ry({angle}) q[{t}];"),
            Op::Cx(c, t) => format!("cx q[{c}],q[{t}];"),
            Op::Swap(a, b) => format!("swap q[{a}],q[{b}];"),
            Op::Ccx(a, b, t) => format!("ccx q[{a}],q[{b}],q[{t}];"),
        };
        text.push_str(&line);
        text.push('\n');
    }
    (text, ancilla_added)
}

/// Parses the exporter's OpenQASM 2.0 dialect back into a circuit,
/// recovering the layout annotation when present.
pub fn from_qasm(text: &str) -> Result<Circuit, QasmError> {
    let mut num_qubits = 0usize;
    let mut variables: Vec<Vec<usize>> = Vec::new();
    let mut controls: Vec<usize> = Vec::new();
    let mut gates: Vec<Gate> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if let Some(rest) = line.strip_prefix("// layout-variables:") {
            variables = serde_json::from_str(rest.trim()).map_err(|e| QasmError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            continue;
        }
        if let Some(rest) = line.strip_prefix("// layout-controls:") {
            controls = serde_json::from_str(rest.trim()).map_err(|e| QasmError::Parse {
                line: lineno,
                message: e.to_string(),
            })?;
            continue;
        }
        if line.is_empty()
            || line.starts_with("//")
            || line.starts_with("OPENQASM")
            || line.starts_with("include")
            || line.starts_with("barrier")
            || line.starts_with("creg")
            || line.starts_with("measure")
        {
            continue;
        }
        let stmt = line.strip_suffix(';').ok_or_else(|| QasmError::Parse {
            line: lineno,
            message: "missing semicolon".into(),
        })?;
        if let Some(rest) = stmt.strip_prefix("qreg") {
            num_qubits = parse_register_size(rest).ok_or(QasmError::Parse {
                line: lineno,
                message: format!("bad register declaration '{stmt}'"),
            })?;
            continue;
        }
        let (head, args) = stmt.split_once(' ').ok_or_else(|| QasmError::Parse {
            line: lineno,
            message: format!("bad statement '{stmt}'"),
        })?;
        let qubits = parse_qubits(args, num_qubits).ok_or(QasmError::QubitRange(lineno))?;
        let gate = match head {
            "x" => Gate::X { target: qubits[0] },
            "h" => Gate::H { target: qubits[0] },
            "cx" => Gate::Cnot {
                control: qubits[0],
                target: qubits[1],
            },
            "swap" => Gate::Swap {
                a: qubits[0],
                b: qubits[1],
            },
            "ccx" => Gate::Block {
                controls: vec![(qubits[0], true), (qubits[1], true)],
                body: vec![Gate::X { target: qubits[2] }],
            },
            _ if head.starts_with("ry(") && head.ends_with(')') => {
                let angle: f64 = head[3..head.len() - 1]
                    .trim()
                    .parse()
                    .map_err(|_| QasmError::Parse {
                        line: lineno,
                        message: format!("bad angle in '{head}'"),
                    })?;
                Gate::Ry {
                    target: qubits[0],
                    angle,
                }
            }
            other => return Err(QasmError::UnsupportedGate(other.to_string())),
        };
        gates.push(gate);
    }
    let mut circuit = Circuit::new(
        num_qubits,
        Layout {
            variables,
            controls,
        },
    );
    circuit.extend(gates);
    Ok(circuit)
}

fn parse_register_size(rest: &str) -> Option<usize> {
    let rest = rest.trim();
    let open = rest.find('[')?;
    let close = rest.find(']')?;
    rest[open + 1..close].parse().ok()
}

fn parse_qubits(args: &str, num_qubits: usize) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for part in args.split(',') {
        let part = part.trim();
        let open = part.find('[')?;
        let close = part.find(']')?;
        let idx: usize = part[open + 1..close].parse().ok()?;
        if idx >= num_qubits {
            return None;
        }
        out.push(idx);
    }
    Some(out)
}
