use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind, Layer};
use crate::error::LreError;

pub const FORMAT_VERSION: &str = "1";

/// Schema violation, located by a JSON path such as `layers[2][0].qubits[1]`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{path}: {message}")]
pub struct JsonError {
    pub path: String,
    pub message: String,
}

impl JsonError {
    fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateEntry {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDocument {
    #[serde(rename = "format-version", default = "default_version")]
    pub format_version: String,
    pub width: usize,
    pub layers: Vec<Vec<GateEntry>>,
}

fn default_version() -> String {
    FORMAT_VERSION.to_string()
}

impl From<&Circuit> for CircuitDocument {
    fn from(circuit: &Circuit) -> Self {
        Self {
            format_version: FORMAT_VERSION.to_string(),
            width: circuit.width(),
            layers: circuit
                .layers()
                .iter()
                .map(|layer| {
                    layer
                        .gates()
                        .iter()
                        .map(|g| GateEntry {
                            kind: g.kind(),
                            qubits: g.qubits().to_vec(),
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

impl TryFrom<CircuitDocument> for Circuit {
    type Error = JsonError;

    fn try_from(doc: CircuitDocument) -> Result<Self, JsonError> {
        if doc.format_version != FORMAT_VERSION {
            return Err(JsonError::at(
                "format-version",
                format!("unsupported version `{}`", doc.format_version),
            ));
        }
        let width = doc.width;
        let mut layers = Vec::with_capacity(doc.layers.len());
        for (li, entries) in doc.layers.into_iter().enumerate() {
            let mut used = Vec::new();
            let mut gates = Vec::with_capacity(entries.len());
            for (gi, entry) in entries.into_iter().enumerate() {
                let path = format!("layers[{li}][{gi}]");
                for (qi, &q) in entry.qubits.iter().enumerate() {
                    if q >= width {
                        return Err(JsonError::at(
                            format!("{path}.qubits[{qi}]"),
                            format!("qubit {q} out of range for width {width}"),
                        ));
                    }
                    if used.contains(&q) {
                        return Err(JsonError::at(
                            format!("{path}.qubits[{qi}]"),
                            format!("qubit {q} already used in layer {li}"),
                        ));
                    }
                    used.push(q);
                }
                let gate = Gate::new(entry.kind, entry.qubits)
                    .map_err(|e| JsonError::at(format!("{path}.qubits"), e.to_string()))?;
                gates.push(gate);
            }
            let layer = Layer::new(gates).map_err(|e| JsonError::at(format!("layers[{li}]"), e.to_string()))?;
            layers.push(layer);
        }
        Circuit::new(width, layers).map_err(|e: LreError| JsonError::at("layers", e.to_string()))
    }
}

pub fn parse_json(text: &str) -> Result<Circuit, JsonError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: CircuitDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "$".to_string() } else { path };
        JsonError::at(path, e.into_inner().to_string())
    })?;
    Circuit::try_from(doc)
}

pub fn emit_json(circuit: &Circuit) -> String {
    let doc = CircuitDocument::from(circuit);
    let mut text = serde_json::to_string_pretty(&doc).expect("circuit document serializes");
    text.push('\n');
    text
}
