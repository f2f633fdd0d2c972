#![allow(dead_code)]

use lre_core::{Chunking, Circuit, Gate, GateKind, Layer};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn arb_gate(width: usize) -> BoxedStrategy<Gate> {
    let single = (0..8usize, 0..width)
        .prop_map(|(k, q)| Gate::single(GateKind::ALL[k], q))
        .boxed();
    if width < 2 {
        return single;
    }
    let cnot = (0..width, 1..width)
        .prop_map(move |(c, off)| Gate::cnot(c, (c + off) % width))
        .boxed();
    prop_oneof![3 => single, 2 => cnot].boxed()
}

/// ASAP-packed circuits, the canonical form produced by the QASM reader.
pub fn arb_circuit(max_width: usize, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (1..=max_width).prop_flat_map(move |w| {
        proptest::collection::vec(arb_gate(w), 0..=max_gates)
            .prop_map(move |gates| Circuit::from_gates(w, gates).unwrap())
    })
}

/// Arbitrary (not necessarily ASAP) layering with exactly `depth` non-empty layers.
pub fn random_layered<R: Rng>(rng: &mut R, width: usize, depth: usize) -> Circuit {
    let mut layers = Vec::with_capacity(depth);
    for _ in 0..depth {
        let mut qubits: Vec<usize> = (0..width).collect();
        qubits.shuffle(rng);
        let take = rng.random_range(1..=width);
        let mut free = qubits[..take].to_vec();
        let mut gates = Vec::new();
        while let Some(q) = free.pop() {
            if !free.is_empty() && rng.random_bool(0.4) {
                let t = free.pop().unwrap();
                gates.push(Gate::cnot(q, t));
            } else {
                let kind = GateKind::ALL[rng.random_range(0..8)];
                gates.push(Gate::single(kind, q));
            }
        }
        layers.push(Layer::new(gates).unwrap());
    }
    Circuit::new(width, layers).unwrap()
}

/// A uniformly random composition of `depth` into contiguous chunks.
pub fn random_chunking<R: Rng>(rng: &mut R, depth: usize) -> Chunking {
    let mut ranges = Vec::new();
    let mut start = 0;
    for end in 1..=depth {
        if end == depth || rng.random_bool(0.5) {
            ranges.push(start..end);
            start = end;
        }
    }
    Chunking::new(ranges, depth).unwrap()
}
