//! Versioned JSON circuit format. Angles round-trip bit-exactly: serde_json
//! prints the shortest decimal that parses back to the same f64.

use qcopula::{Circuit, Gate, Layout};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CIRCUIT_SCHEMA: &str = "qcopula-circuit/1";

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("unsupported schema '{0}', expected '{CIRCUIT_SCHEMA}'")]
    BadSchema(String),
    #[error(transparent)]
    Serde(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    schema: String,
    num_qubits: usize,
    layout: LayoutDoc,
    gates: Vec<GateDoc>,
}

#[derive(Serialize, Deserialize)]
struct LayoutDoc {
    variables: Vec<Vec<usize>>,
    controls: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum GateDoc {
    X {
        target: usize,
    },
    H {
        target: usize,
    },
    Ry {
        target: usize,
        angle: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Swap {
        a: usize,
        b: usize,
    },
    Block {
        controls: Vec<(usize, u8)>,
        body: Vec<GateDoc>,
    },
}

fn gate_to_doc(gate: &Gate) -> GateDoc {
    match gate {
        Gate::X { target } => GateDoc::X { target: *target },
        Gate::H { target } => GateDoc::H { target: *target },
        Gate::Ry { target, angle } => GateDoc::Ry {
            target: *target,
            angle: *angle,
        },
        Gate::Cnot { control, target } => GateDoc::Cnot {
            control: *control,
            target: *target,
        },
        Gate::Swap { a, b } => GateDoc::Swap { a: *a, b: *b },
        Gate::Block { controls, body } => GateDoc::Block {
            controls: controls.iter().map(|&(q, b)| (q, u8::from(b))).collect(),
            body: body.iter().map(gate_to_doc).collect(),
        },
    }
}

fn doc_to_gate(doc: &GateDoc) -> Gate {
    match doc {
        GateDoc::X { target } => Gate::X { target: *target },
        GateDoc::H { target } => Gate::H { target: *target },
        GateDoc::Ry { target, angle } => Gate::Ry {
            target: *target,
            angle: *angle,
        },
        GateDoc::Cnot { control, target } => Gate::Cnot {
            control: *control,
            target: *target,
        },
        GateDoc::Swap { a, b } => Gate::Swap { a: *a, b: *b },
        GateDoc::Block { controls, body } => Gate::Block {
            controls: controls.iter().map(|&(q, b)| (q, b != 0)).collect(),
            body: body.iter().map(doc_to_gate).collect(),
        },
    }
}

pub fn to_json(circuit: &Circuit) -> String {
    let doc = CircuitDoc {
        schema: CIRCUIT_SCHEMA.to_string(),
        num_qubits: circuit.num_qubits,
        layout: LayoutDoc {
            variables: circuit.layout.variables.clone(),
            controls: circuit.layout.controls.clone(),
        },
        gates: circuit.gates.iter().map(gate_to_doc).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("circuit serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<Circuit, JsonError> {
    let doc: CircuitDoc = serde_json::from_str(text)?;
    if doc.schema != CIRCUIT_SCHEMA {
        return Err(JsonError::BadSchema(doc.schema));
    }
    let mut circuit = Circuit::new(
        doc.num_qubits,
        Layout {
            variables: doc.layout.variables,
            controls: doc.layout.controls,
        },
    );
    circuit.extend(doc.gates.iter().map(doc_to_gate));
    Ok(circuit)
}
