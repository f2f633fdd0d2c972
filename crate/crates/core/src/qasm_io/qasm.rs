use std::fmt;

use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct QasmError {
    pub line: usize,
    pub message: String,
}

impl QasmError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

/// A statement that was accepted but has no effect on the circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QasmWarning {
    pub line: usize,
    pub statement: String,
}

impl fmt::Display for QasmWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: ignored `{}`", self.line, self.statement)
    }
}

fn gate_kind(name: &str) -> Option<GateKind> {
    Some(match name {
        "h" => GateKind::H,
        "x" => GateKind::X,
        "y" => GateKind::Y,
        "z" => GateKind::Z,
        "s" => GateKind::S,
        "t" => GateKind::T,
        "sdg" => GateKind::Sdg,
        "tdg" => GateKind::Tdg,
        "cx" => GateKind::Cnot,
        _ => return None,
    })
}

fn qasm_name(kind: GateKind) -> &'static str {
    match kind {
        GateKind::H => "h",
        GateKind::X => "x",
        GateKind::Y => "y",
        GateKind::Z => "z",
        GateKind::S => "s",
        GateKind::T => "t",
        GateKind::Sdg => "sdg",
        GateKind::Tdg => "tdg",
        GateKind::Cnot => "cx",
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `name[index]` into its parts.
fn parse_indexed(arg: &str, line: usize) -> Result<(&str, usize), QasmError> {
    let arg = arg.trim();
    let open = arg
        .find('[')
        .ok_or_else(|| QasmError::new(line, format!("expected `reg[index]`, got `{arg}`")))?;
    let inner = arg[open + 1..]
        .strip_suffix(']')
        .ok_or_else(|| QasmError::new(line, format!("missing `]` in `{arg}`")))?;
    let name = arg[..open].trim();
    if !is_identifier(name) {
        return Err(QasmError::new(line, format!("invalid register name `{name}`")));
    }
    let index = inner
        .trim()
        .parse::<usize>()
        .map_err(|_| QasmError::new(line, format!("invalid index `{inner}`")))?;
    Ok((name, index))
}

/// Strips `//` comments and splits on `;`, recording the line each statement starts on.
fn statements(text: &str) -> Result<Vec<(usize, String)>, QasmError> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut start_line = 1;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split("//").next().unwrap_or("");
        let mut rest = line;
        while let Some(pos) = rest.find(';') {
            let piece = &rest[..pos];
            if current.trim().is_empty() {
                start_line = line_no;
            }
            current.push_str(piece);
            let stmt = current.trim().to_string();
            if stmt.is_empty() {
                return Err(QasmError::new(line_no, "empty statement"));
            }
            out.push((start_line, stmt));
            current.clear();
            rest = &rest[pos + 1..];
        }
        if !rest.trim().is_empty() {
            if current.trim().is_empty() {
                start_line = line_no;
            }
            current.push_str(rest);
            current.push(' ');
        }
    }
    if !current.trim().is_empty() {
        return Err(QasmError::new(start_line, "missing `;` at end of statement"));
    }
    Ok(out)
}

pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let (circuit, warnings) = parse_qasm_with_warnings(text)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(circuit)
}

/// Parses the supported OpenQASM 2.0 subset. Gates are ASAP-packed into layers.
pub fn parse_qasm_with_warnings(text: &str) -> Result<(Circuit, Vec<QasmWarning>), QasmError> {
    let mut register: Option<(String, usize)> = None;
    let mut gates: Vec<Gate> = Vec::new();
    let mut warnings = Vec::new();
    let mut last_line = 1;

    for (line, stmt) in statements(text)? {
        last_line = line;
        let (head, args) = match stmt.find(char::is_whitespace) {
            Some(pos) => (&stmt[..pos], stmt[pos..].trim()),
            None => (stmt.as_str(), ""),
        };
        match head {
            "OPENQASM" => {
                if args != "2.0" {
                    return Err(QasmError::new(line, format!("unsupported version `{args}`")));
                }
            }
            "include" => {}
            "qreg" => {
                if register.is_some() {
                    return Err(QasmError::new(line, "multiple qregs are not supported"));
                }
                let (name, size) = parse_indexed(args, line)?;
                register = Some((name.to_string(), size));
            }
            "creg" | "measure" | "barrier" => warnings.push(QasmWarning {
                line,
                statement: stmt.clone(),
            }),
            _ => {
                if head.contains('(') {
                    let name = &head[..head.find('(').unwrap_or(head.len())];
                    return Err(QasmError::new(line, format!("unknown gate `{name}`")));
                }
                let kind = gate_kind(head)
                    .ok_or_else(|| QasmError::new(line, format!("unknown gate `{head}`")))?;
                let (reg_name, width) = register
                    .as_ref()
                    .ok_or_else(|| QasmError::new(line, "gate applied before any qreg"))?;
                let operands: Vec<&str> = if args.is_empty() {
                    Vec::new()
                } else {
                    args.split(',').collect()
                };
                if operands.len() != kind.arity() {
                    return Err(QasmError::new(
                        line,
                        format!(
                            "`{head}` takes {} operand(s), got {}",
                            kind.arity(),
                            operands.len()
                        ),
                    ));
                }
                let mut qubits = Vec::with_capacity(operands.len());
                for op in operands {
                    let (name, index) = parse_indexed(op, line)?;
                    if name != reg_name {
                        return Err(QasmError::new(line, format!("unknown register `{name}`")));
                    }
                    if index >= *width {
                        return Err(QasmError::new(
                            line,
                            format!("qubit {name}[{index}] out of range for qreg of size {width}"),
                        ));
                    }
                    qubits.push(index);
                }
                let gate = Gate::new(kind, qubits).map_err(|e| QasmError::new(line, e.to_string()))?;
                gates.push(gate);
            }
        }
    }

    let (_, width) = register.ok_or_else(|| QasmError::new(last_line, "no qreg declared"))?;
    let circuit =
        Circuit::from_gates(width, gates).map_err(|e| QasmError::new(last_line, e.to_string()))?;
    Ok((circuit, warnings))
}

/// Writes the circuit layer by layer under a single register `q`.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    out.push_str(&format!("qreg q[{}];\n", circuit.width()));
    for gate in circuit.gates() {
        let operands: Vec<String> = gate.qubits().iter().map(|q| format!("q[{q}]")).collect();
        out.push_str(&format!("{} {};\n", qasm_name(gate.kind()), operands.join(",")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Layer;

    #[test]
    fn sequential_dependency() {
        let c = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.width(), 2);
        assert_eq!(
            c.layers(),
            &[
                Layer::new(vec![Gate::single(GateKind::H, 0)]).unwrap(),
                Layer::new(vec![Gate::cnot(0, 1)]).unwrap(),
            ]
        );
    }

    #[test]
    fn parallel_gates_share_a_layer() {
        let c = parse_qasm("qreg q[2]; h q[0]; h q[1];").unwrap();
        assert_eq!(c.depth(), 1);
        assert_eq!(c.layers()[0].gates().len(), 2);
    }

    #[test]
    fn unknown_gate() {
        let err = parse_qasm("qreg q[1];\nrx(0.1) q[0];").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("unknown gate"), "{err}");
        let err = parse_qasm("qreg q[1]; u3 q[0];").unwrap_err();
        assert!(err.message.contains("unknown gate"));
    }

    #[test]
    fn error_paths_carry_line_numbers() {
        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[2];").unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("out of range"));

        let err = parse_qasm("qreg q[2];\nqreg r[2];").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("multiple qregs"));

        let err = parse_qasm("qreg q[2];\ncx q[0] q[1];").unwrap_err();
        assert_eq!(err.line, 2);

        let err = parse_qasm("qreg q[2];\nh q[0]").unwrap_err();
        assert!(err.message.contains("missing `;`"));

        assert!(parse_qasm("h q[0];").is_err());
        assert!(parse_qasm("qreg q[2]; cx q[1],q[1];").is_err());
        assert!(parse_qasm("OPENQASM 3.0; qreg q[1];").is_err());
    }

    #[test]
    fn ignored_statements_warn() {
        let text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\ncreg c[1];\n\
                    h q[0]; // comment\nbarrier q[0];\nmeasure q[0] -> c[0];\n";
        let (c, warnings) = parse_qasm_with_warnings(text).unwrap();
        assert_eq!(c.gate_count(), 1);
        assert_eq!(warnings.len(), 3);
        assert_eq!(warnings[0].line, 4);
    }

    #[test]
    fn statement_spanning_lines() {
        let c = parse_qasm("qreg q[2];\ncx q[0],\n   q[1];").unwrap();
        assert_eq!(c.gate_count(), 1);
    }

    #[test]
    fn emit_empty() {
        assert_eq!(
            emit_qasm(&Circuit::empty(1)),
            "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n"
        );
    }

    #[test]
    fn emit_in_order() {
        let c = Circuit::from_gates(2, vec![Gate::single(GateKind::H, 0), Gate::cnot(0, 1)]).unwrap();
        let text = emit_qasm(&c);
        assert!(text.ends_with("qreg q[2];\nh q[0];\ncx q[0],q[1];\n"));
        assert_eq!(parse_qasm(&text).unwrap(), c);
    }
}
