//! Layered circuit representation and unitary folding.
//!
//! Layers are stored in application order: `layers()[0]` acts first. Every
//! operation here is a pure function over immutable values.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{LreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Sdg,
    Tdg,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::Sdg,
        GateKind::Tdg,
        GateKind::Cnot,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn adjoint(self) -> GateKind {
        match self {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            other => other,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::T => "T",
            GateKind::Sdg => "Sdg",
            GateKind::Tdg => "Tdg",
            GateKind::Cnot => "CNOT",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A gate from the fixed gate set. For CNOT the control comes first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Result<Self> {
        if qubits.len() != kind.arity() {
            return Err(LreError::GateArity {
                kind: kind.name(),
                expected: kind.arity(),
                actual: qubits.len(),
            });
        }
        if kind.arity() == 2 && qubits[0] == qubits[1] {
            return Err(LreError::RepeatedQubit(qubits[0]));
        }
        Ok(Self { kind, qubits })
    }

    pub fn single(kind: GateKind, qubit: usize) -> Self {
        assert_eq!(kind.arity(), 1, "{kind} is not a single-qubit gate");
        Self {
            kind,
            qubits: vec![qubit],
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT control and target must differ");
        Self {
            kind: GateKind::Cnot,
            qubits: vec![control, target],
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn adjoint(&self) -> Gate {
        Gate {
            kind: self.kind.adjoint(),
            qubits: self.qubits.clone(),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in &self.qubits {
            write!(f, " q{q}")?;
        }
        Ok(())
    }
}

/// Gates acting concurrently; no qubit is touched twice.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Layer {
    gates: Vec<Gate>,
}

impl Layer {
    pub fn new(gates: Vec<Gate>) -> Result<Self> {
        let mut seen = Vec::new();
        for gate in &gates {
            for &q in gate.qubits() {
                if seen.contains(&q) {
                    return Err(LreError::QubitCollision { layer: 0, qubit: q });
                }
                seen.push(q);
            }
        }
        Ok(Self { gates })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn touches(&self, qubit: usize) -> bool {
        self.gates.iter().any(|g| g.qubits().contains(&qubit))
    }

    pub fn adjoint(&self) -> Layer {
        Layer {
            gates: self.gates.iter().map(Gate::adjoint).collect(),
        }
    }

    fn max_qubit(&self) -> Option<usize> {
        self.gates.iter().flat_map(|g| g.qubits().iter().copied()).max()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    width: usize,
    layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(width: usize, layers: Vec<Layer>) -> Result<Self> {
        for layer in &layers {
            if let Some(q) = layer.max_qubit() {
                if q >= width {
                    return Err(LreError::QubitOutOfRange { qubit: q, width });
                }
            }
        }
        Ok(Self { width, layers })
    }

    pub fn empty(width: usize) -> Self {
        Self {
            width,
            layers: Vec::new(),
        }
    }

    /// Builds a circuit from a gate sequence using ASAP packing: each gate goes
    /// into the earliest layer after the last layer touching any of its qubits.
    pub fn from_gates(width: usize, gates: impl IntoIterator<Item = Gate>) -> Result<Self> {
        let mut layers: Vec<Layer> = Vec::new();
        // frontier[q] = number of layers already occupied on qubit q
        let mut frontier = vec![0usize; width];
        for gate in gates {
            for &q in gate.qubits() {
                if q >= width {
                    return Err(LreError::QubitOutOfRange { qubit: q, width });
                }
            }
            let slot = gate.qubits().iter().map(|&q| frontier[q]).max().unwrap_or(0);
            if slot == layers.len() {
                layers.push(Layer::default());
            }
            for &q in gate.qubits() {
                frontier[q] = slot + 1;
            }
            layers[slot].gates.push(gate);
        }
        Ok(Self { width, layers })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flat_map(|l| l.gates.iter())
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.gates.len()).sum()
    }

    /// Sequence of gates touching each qubit, in application order.
    pub fn gates_per_qubit(&self) -> Vec<Vec<Gate>> {
        let mut out = vec![Vec::new(); self.width];
        for gate in self.gates() {
            for &q in gate.qubits() {
                out[q].push(gate.clone());
            }
        }
        out
    }

    /// Layers reversed and every gate adjointed.
    pub fn inverse(&self) -> Circuit {
        Circuit {
            width: self.width,
            layers: self.layers.iter().rev().map(Layer::adjoint).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.width != other.width {
            return Err(LreError::LengthMismatch {
                what: "qubits",
                expected: self.width,
                actual: other.width,
            });
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        Ok(Circuit {
            width: self.width,
            layers,
        })
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit on {} qubit(s), depth {}", self.width, self.depth())?;
        for (i, layer) in self.layers.iter().enumerate() {
            let gates: Vec<String> = layer.gates.iter().map(ToString::to_string).collect();
            writeln!(f, "  L{}: {}", i + 1, gates.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldMode {
    /// The whole chunk is folded as one block: `(C C†)^m C`.
    Global,
    /// Every elementary layer is folded in place: `(G G†)^m G`.
    #[default]
    Local,
}

/// Contiguous, non-overlapping layer ranges covering a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chunking {
    ranges: Vec<Range<usize>>,
}

impl Chunking {
    pub fn new(ranges: Vec<Range<usize>>, depth: usize) -> Result<Self> {
        let mut next = 0;
        for r in &ranges {
            if r.start != next {
                return Err(LreError::InvalidChunking(format!(
                    "chunk {r:?} does not start at layer {next}"
                )));
            }
            if r.is_empty() {
                return Err(LreError::InvalidChunking(format!("chunk {r:?} is empty")));
            }
            next = r.end;
        }
        if next != depth {
            return Err(LreError::InvalidChunking(format!(
                "chunks cover {next} layers, circuit has {depth}"
            )));
        }
        Ok(Self { ranges })
    }

    /// One chunk per layer.
    pub fn layerwise(depth: usize) -> Self {
        Self {
            ranges: (0..depth).map(|i| i..i + 1).collect(),
        }
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.ranges.iter().map(|r| r.len()).collect()
    }
}

/// Splits a circuit into `chunks` contiguous pieces of near-equal depth. The
/// first `depth % chunks` pieces get the extra layer.
pub fn chunk_circuit(circuit: &Circuit, chunks: usize) -> Result<Chunking> {
    let depth = circuit.depth();
    if chunks == 0 || chunks > depth {
        return Err(LreError::InvalidChunkCount { chunks, depth });
    }
    let base = depth / chunks;
    let extra = depth % chunks;
    let mut ranges = Vec::with_capacity(chunks);
    let mut start = 0;
    for k in 0..chunks {
        let len = base + usize::from(k < extra);
        ranges.push(start..start + len);
        start += len;
    }
    Ok(Chunking { ranges })
}

fn check_scale_factor(lambda: u32) -> Result<u32> {
    if lambda == 0 || lambda % 2 == 0 {
        return Err(LreError::InvalidScaleFactor(lambda));
    }
    Ok((lambda - 1) / 2)
}

/// Folds a chunk so its depth grows by the odd factor `lambda`.
pub fn fold_chunk(chunk: &[Layer], lambda: u32, mode: FoldMode) -> Result<Vec<Layer>> {
    let folds = check_scale_factor(lambda)? as usize;
    if chunk.is_empty() {
        return Err(LreError::EmptyChunk);
    }
    let mut out = Vec::with_capacity(chunk.len() * lambda as usize);
    match mode {
        FoldMode::Global => {
            let inverse: Vec<Layer> = chunk.iter().rev().map(Layer::adjoint).collect();
            for _ in 0..folds {
                out.extend_from_slice(chunk);
                out.extend_from_slice(&inverse);
            }
            out.extend_from_slice(chunk);
        }
        FoldMode::Local => {
            for layer in chunk {
                let adjoint = layer.adjoint();
                for _ in 0..folds {
                    out.push(layer.clone());
                    out.push(adjoint.clone());
                }
                out.push(layer.clone());
            }
        }
    }
    Ok(out)
}

/// Folds chunk `k` of `chunking` by `lambdas[k]`.
pub fn fold_circuit(
    circuit: &Circuit,
    chunking: &Chunking,
    lambdas: &[u32],
    mode: FoldMode,
) -> Result<Circuit> {
    if lambdas.len() != chunking.len() {
        return Err(LreError::LengthMismatch {
            what: "scale factors",
            expected: chunking.len(),
            actual: lambdas.len(),
        });
    }
    if chunking.ranges.last().map_or(0, |r| r.end) != circuit.depth() {
        return Err(LreError::InvalidChunking(format!(
            "chunking does not match circuit depth {}",
            circuit.depth()
        )));
    }
    let folded_depth: usize = chunking
        .ranges
        .iter()
        .zip(lambdas)
        .map(|(r, &l)| r.len() * l as usize)
        .sum();
    let mut layers = Vec::with_capacity(folded_depth);
    for (range, &lambda) in chunking.ranges.iter().zip(lambdas) {
        layers.extend(fold_chunk(&circuit.layers[range.clone()], lambda, mode)?);
    }
    Ok(Circuit {
        width: circuit.width,
        layers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(q: usize) -> Layer {
        Layer::new(vec![Gate::single(GateKind::H, q)]).unwrap()
    }

    fn s(q: usize) -> Layer {
        Layer::new(vec![Gate::single(GateKind::S, q)]).unwrap()
    }

    fn cx(c: usize, t: usize) -> Layer {
        Layer::new(vec![Gate::cnot(c, t)]).unwrap()
    }

    fn three_layer() -> Circuit {
        Circuit::new(2, vec![h(0), cx(0, 1), s(1)]).unwrap()
    }

    #[test]
    fn adjoint_pairs() {
        for kind in GateKind::ALL {
            assert_eq!(kind.adjoint().adjoint(), kind);
        }
        for kind in [GateKind::H, GateKind::X, GateKind::Y, GateKind::Z, GateKind::Cnot] {
            assert_eq!(kind.adjoint(), kind);
        }
        assert_eq!(GateKind::S.adjoint(), GateKind::Sdg);
        assert_eq!(GateKind::T.adjoint(), GateKind::Tdg);
    }

    #[test]
    fn gate_validation() {
        assert!(matches!(
            Gate::new(GateKind::Cnot, vec![1]),
            Err(LreError::GateArity { .. })
        ));
        assert_eq!(
            Gate::new(GateKind::Cnot, vec![2, 2]),
            Err(LreError::RepeatedQubit(2))
        );
        assert!(Layer::new(vec![Gate::cnot(0, 1), Gate::single(GateKind::X, 1)]).is_err());
        assert_eq!(
            Circuit::new(1, vec![cx(0, 1)]),
            Err(LreError::QubitOutOfRange { qubit: 1, width: 1 })
        );
    }

    #[test]
    fn global_fold_single_layer() {
        let chunk = [s(0)];
        assert_eq!(fold_chunk(&chunk, 1, FoldMode::Global).unwrap(), vec![s(0)]);
        let folded = fold_chunk(&chunk, 3, FoldMode::Global).unwrap();
        assert_eq!(folded, vec![s(0), s(0).adjoint(), s(0)]);
    }

    #[test]
    fn local_fold_two_layers() {
        let g1 = h(0);
        let g2 = s(1);
        let folded = fold_chunk(&[g1.clone(), g2.clone()], 3, FoldMode::Local).unwrap();
        assert_eq!(
            folded,
            vec![g1.clone(), g1.adjoint(), g1, g2.clone(), g2.adjoint(), g2]
        );
    }

    #[test]
    fn global_fold_two_layers_mirrors_chunk() {
        let folded = fold_chunk(&[h(0), s(1)], 3, FoldMode::Global).unwrap();
        assert_eq!(folded, vec![h(0), s(1), s(1).adjoint(), h(0), h(0), s(1)]);
    }

    #[test]
    fn fold_rejects_bad_lambda() {
        for lambda in [0, 2, 4] {
            assert_eq!(
                fold_chunk(&[h(0)], lambda, FoldMode::Local),
                Err(LreError::InvalidScaleFactor(lambda))
            );
        }
        assert_eq!(fold_chunk(&[], 3, FoldMode::Local), Err(LreError::EmptyChunk));
    }

    #[test]
    fn fold_circuit_all_ones_is_identity() {
        let c = three_layer();
        let chunking = Chunking::layerwise(3);
        for mode in [FoldMode::Global, FoldMode::Local] {
            assert_eq!(fold_circuit(&c, &chunking, &[1, 1, 1], mode).unwrap(), c);
        }
    }

    #[test]
    fn fold_circuit_middle_layer() {
        let c = three_layer();
        let folded = fold_circuit(&c, &Chunking::layerwise(3), &[1, 3, 1], FoldMode::Global).unwrap();
        assert_eq!(folded.depth(), 5);
        let expected = vec![h(0), cx(0, 1), cx(0, 1), cx(0, 1), s(1)];
        assert_eq!(folded.layers(), expected.as_slice());
    }

    #[test]
    fn fold_circuit_depth_is_sum_of_lambdas() {
        let c = three_layer();
        let folded = fold_circuit(&c, &Chunking::layerwise(3), &[3, 5, 7], FoldMode::Local).unwrap();
        assert_eq!(folded.depth(), 15);
    }

    #[test]
    fn fold_circuit_arity_mismatch() {
        let c = three_layer();
        assert!(matches!(
            fold_circuit(&c, &Chunking::layerwise(3), &[1, 3], FoldMode::Local),
            Err(LreError::LengthMismatch { expected: 3, actual: 2, .. })
        ));
    }

    #[test]
    fn chunk_sizes() {
        let c6 = Circuit::new(1, (0..6).map(|_| h(0)).collect()).unwrap();
        assert_eq!(chunk_circuit(&c6, 1).unwrap().sizes(), vec![6]);
        assert_eq!(chunk_circuit(&c6, 3).unwrap().sizes(), vec![2, 2, 2]);
        let c7 = Circuit::new(1, (0..7).map(|_| h(0)).collect()).unwrap();
        assert_eq!(chunk_circuit(&c7, 3).unwrap().sizes(), vec![3, 2, 2]);
        assert_eq!(chunk_circuit(&c7, 7).unwrap(), Chunking::layerwise(7));
        assert!(chunk_circuit(&c7, 0).is_err());
        assert!(chunk_circuit(&c7, 8).is_err());
    }

    #[test]
    fn chunking_validation() {
        assert!(Chunking::new(vec![0..2, 2..3], 3).is_ok());
        assert!(Chunking::new(vec![0..2, 3..4], 4).is_err());
        assert!(Chunking::new(std::iter::once(0..2).collect(), 3).is_err());
        assert!(Chunking::new(vec![0..0, 0..1], 1).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Circuit::empty(2).inverse(), Circuit::empty(2));
        let c = Circuit::new(2, vec![h(0), cx(0, 1)]).unwrap();
        assert_eq!(c.inverse().layers(), &[cx(0, 1), h(0)]);
        let c = Circuit::new(1, vec![s(0)]).unwrap();
        assert_eq!(
            c.inverse().layers(),
            &[Layer::new(vec![Gate::single(GateKind::Sdg, 0)]).unwrap()]
        );
        let c = three_layer();
        assert_eq!(c.inverse().inverse(), c);
    }

    #[test]
    fn asap_packing() {
        let c = Circuit::from_gates(
            2,
            vec![Gate::single(GateKind::H, 0), Gate::single(GateKind::H, 1)],
        )
        .unwrap();
        assert_eq!(c.depth(), 1);
        let c = Circuit::from_gates(
            3,
            vec![
                Gate::single(GateKind::H, 0),
                Gate::cnot(0, 1),
                Gate::single(GateKind::X, 2),
                Gate::single(GateKind::Z, 0),
            ],
        )
        .unwrap();
        assert_eq!(c.depth(), 3);
        assert_eq!(c.layers()[0].gates().len(), 2);
        assert!(c.layers()[2].touches(0));
    }
}
