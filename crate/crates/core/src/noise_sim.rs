//! Exact density-matrix simulation under amplitude-damping noise.
//!
//! Basis states are labelled big-endian: qubit 0 is the most significant bit,
//! so `|10⟩` has qubit 0 excited. Gates act by contraction on their own qubit
//! indices; no full `2ⁿ × 2ⁿ` unitary is ever built.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{LreError, Result};

pub const DEFAULT_MAX_QUBITS: usize = 10;

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// 2×2 unitary of a single-qubit gate kind.
pub fn single_qubit_unitary(kind: GateKind) -> Option<Mat2> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    Some(match kind {
        GateKind::H => [[real(h), real(h)], [real(h), real(-h)]],
        GateKind::X => [[ZERO, ONE], [ONE, ZERO]],
        GateKind::Y => [[ZERO, -I], [I, ZERO]],
        GateKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
        GateKind::S => [[ONE, ZERO], [ZERO, I]],
        GateKind::Sdg => [[ONE, ZERO], [ZERO, -I]],
        GateKind::T => [[ONE, ZERO], [ZERO, t]],
        GateKind::Tdg => [[ONE, ZERO], [ZERO, t.conj()]],
        GateKind::Cnot => return None,
    })
}

/// Kraus operators `E₀ = [[1, 0], [0, √(1-p)]]`, `E₁ = [[0, √p], [0, 0]]`.
pub fn damping_kraus(p: f64) -> [Mat2; 2] {
    [
        [[ONE, ZERO], [ZERO, real((1.0 - p).sqrt())]],
        [[ZERO, real(p.sqrt())], [ZERO, ZERO]],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(qubits: usize) -> Self {
        let dim = 1usize << qubits;
        let mut data = vec![ZERO; dim * dim];
        data[0] = ONE;
        Self { qubits, dim, data }
    }

    /// `|b⟩⟨b|` for the computational basis state with index `b`.
    pub fn basis_state(qubits: usize, index: usize) -> Self {
        let dim = 1usize << qubits;
        assert!(index < dim);
        let mut data = vec![ZERO; dim * dim];
        data[index * dim + index] = ONE;
        Self { qubits, dim, data }
    }

    pub fn from_entries(qubits: usize, data: Vec<Complex64>) -> Self {
        let dim = 1usize << qubits;
        assert_eq!(data.len(), dim * dim, "wrong number of entries");
        Self { qubits, dim, data }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Real parts of the diagonal: the computational-basis distribution.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (i..self.dim).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// `½ ‖ρ - σ‖₁`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let diff = DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j) - other.get(i, j));
        0.5 * diff.symmetric_eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.qubits {
            return Err(LreError::QubitOutOfRange {
                qubit,
                width: self.qubits,
            });
        }
        Ok(())
    }

    /// `ρ → Σ_k K_k ρ K_k†` for operators acting on one qubit.
    pub fn apply_kraus(&mut self, qubit: usize, ops: &[Mat2]) -> Result<()> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let dim = self.dim;
        for r0 in (0..dim).filter(|r| r & mask == 0) {
            let r1 = r0 | mask;
            for c0 in (0..dim).filter(|c| c & mask == 0) {
                let c1 = c0 | mask;
                let block = [
                    [self.data[r0 * dim + c0], self.data[r0 * dim + c1]],
                    [self.data[r1 * dim + c0], self.data[r1 * dim + c1]],
                ];
                let mut out = [[ZERO; 2]; 2];
                for k in ops {
                    // K B
                    let mut kb = [[ZERO; 2]; 2];
                    for a in 0..2 {
                        for b in 0..2 {
                            kb[a][b] = k[a][0] * block[0][b] + k[a][1] * block[1][b];
                        }
                    }
                    // (K B) K†
                    for a in 0..2 {
                        for b in 0..2 {
                            out[a][b] += kb[a][0] * k[b][0].conj() + kb[a][1] * k[b][1].conj();
                        }
                    }
                }
                self.data[r0 * dim + c0] = out[0][0];
                self.data[r0 * dim + c1] = out[0][1];
                self.data[r1 * dim + c0] = out[1][0];
                self.data[r1 * dim + c1] = out[1][1];
            }
        }
        Ok(())
    }

    /// `ρ → U ρ U†` for a gate from the fixed set.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        for &q in gate.qubits() {
            self.check_qubit(q)?;
        }
        match single_qubit_unitary(gate.kind()) {
            Some(u) => self.apply_kraus(gate.qubits()[0], &[u]),
            None => {
                self.apply_cnot(gate.qubits()[0], gate.qubits()[1]);
                Ok(())
            }
        }
    }

    /// CNOT permutes basis states, so `ρ'_{ij} = ρ_{π(i) π(j)}`.
    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cm = self.mask(control);
        let tm = self.mask(target);
        let perm = |i: usize| if i & cm != 0 { i ^ tm } else { i };
        let dim = self.dim;
        let old = std::mem::take(&mut self.data);
        self.data = (0..dim * dim)
            .map(|idx| old[perm(idx / dim) * dim + perm(idx % dim)])
            .collect();
    }

    /// Amplitude damping with probability `p` on one qubit. Equivalent to
    /// [`DensityMatrix::apply_kraus`] with [`damping_kraus`], written out:
    /// `ρ₀₀ += p ρ₁₁`, coherences scale by `√(1-p)`, `ρ₁₁ *= 1-p`.
    pub fn apply_damping(&mut self, qubit: usize, p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(LreError::InvalidProbability(p));
        }
        self.check_qubit(qubit)?;
        if p == 0.0 {
            return Ok(());
        }
        let mask = self.mask(qubit);
        let dim = self.dim;
        let keep = (1.0 - p).sqrt();
        for r0 in (0..dim).filter(|r| r & mask == 0) {
            let r1 = r0 | mask;
            for c0 in (0..dim).filter(|c| c & mask == 0) {
                let c1 = c0 | mask;
                let excited = self.data[r1 * dim + c1];
                self.data[r0 * dim + c0] += excited * p;
                self.data[r0 * dim + c1] *= keep;
                self.data[r1 * dim + c0] *= keep;
                self.data[r1 * dim + c1] = excited * (1.0 - p);
            }
        }
        Ok(())
    }
}

/// Amplitude damping after every gate: `p1` on single-qubit gates, and
/// `p2 ⊗ p2` on both qubits of a CNOT. Idle qubits are noiseless.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub enabled: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p1: 0.04,
            p2: 0.08,
            enabled: true,
        }
    }
}

impl NoiseModel {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        for p in [p1, p2] {
            if !(0.0..=1.0).contains(&p) {
                return Err(LreError::InvalidProbability(p));
            }
        }
        Ok(Self { p1, p2, enabled: true })
    }

    pub fn noiseless() -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            enabled: false,
        }
    }

    fn is_active(&self) -> bool {
        self.enabled && (self.p1 > 0.0 || self.p2 > 0.0)
    }
}

pub fn simulate_exact(circuit: &Circuit, noise: &NoiseModel) -> Result<DensityMatrix> {
    simulate_exact_with_limit(circuit, noise, DEFAULT_MAX_QUBITS)
}

pub fn simulate_exact_with_limit(
    circuit: &Circuit,
    noise: &NoiseModel,
    max_qubits: usize,
) -> Result<DensityMatrix> {
    if circuit.width() > max_qubits {
        return Err(LreError::WidthLimit {
            width: circuit.width(),
            limit: max_qubits,
        });
    }
    let mut rho = DensityMatrix::zero_state(circuit.width());
    let noisy = noise.is_active();
    for layer in circuit.layers() {
        for gate in layer.gates() {
            rho.apply_gate(gate)?;
            if noisy {
                let p = if gate.kind() == GateKind::Cnot { noise.p2 } else { noise.p1 };
                for &q in gate.qubits() {
                    rho.apply_damping(q, p)?;
                }
            }
        }
    }
    Ok(rho)
}

/// Observables diagonal in the computational basis.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `|0…0⟩⟨0…0|`.
    #[default]
    ZeroProjector,
    /// `Σ_b w_b |b⟩⟨b|`, one weight per basis state.
    Diagonal(Vec<f64>),
}

impl Observable {
    pub fn exact_value(&self, probabilities: &[f64]) -> Result<f64> {
        match self {
            Observable::ZeroProjector => Ok(probabilities[0]),
            Observable::Diagonal(w) => {
                if w.len() != probabilities.len() {
                    return Err(LreError::LengthMismatch {
                        what: "observable weights",
                        expected: probabilities.len(),
                        actual: w.len(),
                    });
                }
                Ok(w.iter().zip(probabilities).map(|(w, p)| w * p).sum())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationEstimate {
    pub value: f64,
    /// 0 for an exact evaluation.
    pub shots: u64,
    pub exact_value: f64,
}

impl ExpectationEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            shots: 0,
            exact_value: value,
        }
    }
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    if n == 0 || p == 0.0 {
        return 0;
    }
    if p == 1.0 {
        return n;
    }
    Binomial::new(n, p).expect("valid binomial parameters").sample(rng)
}

/// Draws `shots` computational-basis outcomes from `probabilities` and averages
/// the observable over them. Outcome counts are drawn as a multinomial
/// (sequential conditional binomials); for the zero projector only the count
/// of `|0…0⟩` matters, which is a single binomial.
pub fn sample_estimate(
    probabilities: &[f64],
    observable: &Observable,
    shots: u64,
    seed: u64,
) -> Result<ExpectationEstimate> {
    let exact_value = observable.exact_value(probabilities)?;
    if shots == 0 {
        return Ok(ExpectationEstimate::exact(exact_value));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let value = match observable {
        Observable::ZeroProjector => binomial(&mut rng, shots, probabilities[0]) as f64 / shots as f64,
        Observable::Diagonal(weights) => {
            let mut remaining = shots;
            let mut mass: f64 = probabilities.iter().map(|p| p.max(0.0)).sum();
            let mut total = 0.0;
            for (&p, &w) in probabilities.iter().zip(weights) {
                if remaining == 0 {
                    break;
                }
                let p = p.max(0.0);
                let count = if mass <= p { remaining } else { binomial(&mut rng, remaining, p / mass) };
                total += w * count as f64;
                remaining -= count;
                mass -= p;
            }
            total / shots as f64
        }
    };
    Ok(ExpectationEstimate {
        value,
        shots,
        exact_value,
    })
}

/// Simulates `circuit` and estimates `observable` with `shots` samples
/// (`0` = exact value).
pub fn estimate_expectation(
    circuit: &Circuit,
    noise: &NoiseModel,
    observable: &Observable,
    shots: u64,
    seed: u64,
) -> Result<ExpectationEstimate> {
    let rho = simulate_exact(circuit, noise)?;
    sample_estimate(&rho.probabilities(), observable, shots, seed)
}
