use thiserror::Error;

use crate::qasm_io::{JsonError, QasmError};

pub type Result<T, E = LreError> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LreError {
    #[error("scale factor {0} is not an odd integer >= 1")]
    InvalidScaleFactor(u32),

    #[error("cannot fold an empty chunk")]
    EmptyChunk,

    #[error("expected {expected} {what}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("chunk count {chunks} out of range for a circuit of depth {depth}")]
    InvalidChunkCount { chunks: usize, depth: usize },

    #[error("invalid chunking: {0}")]
    InvalidChunking(String),

    #[error("gate {kind} expects {expected} qubit(s), got {actual}")]
    GateArity {
        kind: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),

    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("qubit {qubit} used by more than one gate in layer {layer}")]
    QubitCollision { layer: usize, qubit: usize },

    #[error("scale-factor gap must be an even integer >= 2, got {0}")]
    InvalidDelta(u32),

    #[error("sample matrix is singular (pivot {pivot:e} in column {column}); choose different scale factors")]
    SingularSampleMatrix { column: usize, pivot: f64 },

    #[error("shot budget {s_tot} is smaller than the number of circuits {circuits}")]
    BudgetTooSmall { s_tot: u64, circuits: usize },

    #[error("circuit width {width} exceeds the simulator limit of {limit} qubits")]
    WidthLimit { width: usize, limit: usize },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Qasm(#[from] QasmError),

    #[error(transparent)]
    Json(#[from] JsonError),
}

impl LreError {
    /// Numerical failures (as opposed to bad input) get their own exit code in the CLI.
    pub fn is_numerical(&self) -> bool {
        matches!(self, LreError::SingularSampleMatrix { .. })
    }
}
