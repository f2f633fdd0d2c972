//! Circuit I/O: a minimal OpenQASM 2.0 subset and a native JSON document.
//!
//! QASM carries no layer boundaries, so imported gates are ASAP-packed. The
//! JSON format stores layers explicitly and round-trips exactly.

mod json;
mod qasm;

pub use json::{emit_json, parse_json, CircuitDocument, GateEntry, JsonError, FORMAT_VERSION};
pub use qasm::{emit_qasm, parse_qasm, parse_qasm_with_warnings, QasmError, QasmWarning};
