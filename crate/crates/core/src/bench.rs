//! Mirror-circuit generators and the trial harness behind the benchmark sweeps.
//!
//! Both families are of the form `C⁻¹ C`, so the ideal value of the
//! `|0…0⟩⟨0…0|` projector is exactly 1 and the absolute error of an estimate
//! is `|estimate − 1|`.

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, FoldMode, Gate, GateKind, Layer};
use crate::error::{LreError, Result};
use crate::noise_sim::{NoiseModel, Observable};
use crate::protocol::{mitigate, MitigationConfig, SimulatorBackend, Strategy};
use crate::seed::derive_seed;

pub const DEFAULT_P_CNOT: f64 = 0.9;
pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_SHOTS: u64 = 1_000_000;
pub const IDEAL_VALUE: f64 = 1.0;

const RANDOM_GATES: [GateKind; 6] = [
    GateKind::H,
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::S,
    GateKind::T,
];

// Seed streams, so instance and sampling seeds never collide.
const STREAM_INSTANCE: u64 = 1;
const STREAM_SAMPLING: u64 = 2;

/// `H(q0)`, a CNOT ladder `q0→q1 … q_{n−2}→q_{n−1}`, then the same in reverse.
/// Depth `2n`. Panics if `n == 0`.
pub fn ghz_mirror(n: usize) -> Circuit {
    assert!(n >= 1, "ghz_mirror needs at least one qubit");
    let mut gates = vec![Gate::single(GateKind::H, 0)];
    gates.extend((1..n).map(|t| Gate::cnot(t - 1, t)));
    let layers: Vec<Layer> = gates
        .into_iter()
        .map(|g| Layer::new(vec![g]).expect("single-gate layer"))
        .collect();
    let half = Circuit::new(n, layers).expect("valid ghz circuit");
    half.then(&half.inverse()).expect("same width")
}

/// A random `C_rand` with exactly `half_depth` layers, followed by its inverse.
///
/// Each layer visits the qubits in random order. An unoccupied qubit is paired
/// by a CNOT (random direction) with another random unoccupied qubit with
/// probability `p_cnot`; otherwise, or when no partner is left, it receives a
/// uniform gate from `{H, X, Y, Z, S, T}`. Every qubit is acted on in every layer.
///
/// Panics if `n == 0` or `p_cnot` is not in `[0, 1]`.
pub fn random_mirror(n: usize, half_depth: usize, p_cnot: f64, seed: u64) -> Circuit {
    assert!(n >= 1, "random_mirror needs at least one qubit");
    assert!((0.0..=1.0).contains(&p_cnot), "p_cnot must lie in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layers = Vec::with_capacity(half_depth);
    for _ in 0..half_depth {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut occupied = vec![false; n];
        let mut gates = Vec::with_capacity(n);
        for &q in &order {
            if occupied[q] {
                continue;
            }
            occupied[q] = true;
            let free: Vec<usize> = (0..n).filter(|&p| !occupied[p]).collect();
            if !free.is_empty() && rng.random_bool(p_cnot) {
                let partner = free[rng.random_range(0..free.len())];
                occupied[partner] = true;
                gates.push(if rng.random_bool(0.5) {
                    Gate::cnot(q, partner)
                } else {
                    Gate::cnot(partner, q)
                });
            } else {
                let kind = RANDOM_GATES[rng.random_range(0..RANDOM_GATES.len())];
                gates.push(Gate::single(kind, q));
            }
        }
        layers.push(Layer::new(gates).expect("disjoint by construction"));
    }
    let half = Circuit::new(n, layers).expect("valid random circuit");
    half.then(&half.inverse()).expect("same width")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    #[serde(rename = "ghz")]
    GhzMirror,
    #[serde(rename = "random")]
    RandomMirror,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::GhzMirror => "ghz",
            Family::RandomMirror => "random",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = LreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ghz" => Ok(Family::GhzMirror),
            "random" => Ok(Family::RandomMirror),
            other => Err(LreError::InvalidConfig(format!("unknown circuit family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVar {
    Qubits,
    Degree,
    Shots,
    Delta,
    Chunks,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Qubits => "qubits",
            SweepVar::Degree => "degree",
            SweepVar::Shots => "shots",
            SweepVar::Delta => "delta",
            SweepVar::Chunks => "chunks",
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVar {
    type Err = LreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qubits" => Ok(SweepVar::Qubits),
            "degree" => Ok(SweepVar::Degree),
            "shots" => Ok(SweepVar::Shots),
            "delta" => Ok(SweepVar::Delta),
            "chunks" => Ok(SweepVar::Chunks),
            other => Err(LreError::InvalidConfig(format!("unknown sweep variable `{other}`"))),
        }
    }
}

/// How many chunks LRE uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChunkSpec {
    /// One chunk per layer.
    Full,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub family: Family,
    pub sweep: SweepVar,
    pub values: Vec<u64>,
    pub trials: usize,
    pub qubits: usize,
    /// Layers of `C_rand` for the random family; the mirror has twice as many.
    pub half_depth: usize,
    pub p_cnot: f64,
    pub degree: u32,
    pub delta: u32,
    pub chunks: ChunkSpec,
    /// 0 runs every trial in exact mode.
    pub s_tot: u64,
    pub mode: FoldMode,
    pub noise: NoiseModel,
    pub strategies: Vec<Strategy>,
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(family: Family, sweep: SweepVar, values: Vec<u64>) -> Self {
        Self {
            family,
            sweep,
            values,
            trials: DEFAULT_TRIALS,
            qubits: 4,
            half_depth: 2,
            p_cnot: DEFAULT_P_CNOT,
            degree: 2,
            delta: 2,
            chunks: ChunkSpec::Full,
            s_tot: DEFAULT_SHOTS,
            mode: FoldMode::Local,
            noise: NoiseModel::default(),
            strategies: Strategy::ALL.to_vec(),
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LreError::InvalidConfig(msg));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.values.is_empty() {
            return bad("sweep needs at least one value".into());
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required".into());
        }
        if !(0.0..=1.0).contains(&self.p_cnot) {
            return bad(format!("p_cnot {} outside [0, 1]", self.p_cnot));
        }
        if self.family == Family::RandomMirror && self.half_depth == 0 {
            return bad("half depth must be >= 1".into());
        }
        for &v in &self.values {
            let point = self.point(v)?;
            if point.qubits == 0 {
                return bad("qubit count must be >= 1".into());
            }
        }
        Ok(())
    }

    fn point(&self, value: u64) -> Result<SweepPoint> {
        let mut p = SweepPoint {
            qubits: self.qubits,
            degree: self.degree,
            delta: self.delta,
            chunks: self.chunks,
            s_tot: self.s_tot,
        };
        let narrow = |v: u64| {
            u32::try_from(v).map_err(|_| LreError::InvalidConfig(format!("sweep value {v} out of range")))
        };
        match self.sweep {
            SweepVar::Qubits => p.qubits = narrow(value)? as usize,
            SweepVar::Degree => p.degree = narrow(value)?,
            SweepVar::Shots => p.s_tot = value,
            SweepVar::Delta => p.delta = narrow(value)?,
            SweepVar::Chunks => p.chunks = ChunkSpec::Fixed(narrow(value)? as usize),
        }
        Ok(p)
    }

    fn instance(&self, qubits: usize, trial: usize) -> Circuit {
        match self.family {
            Family::GhzMirror => ghz_mirror(qubits),
            Family::RandomMirror => random_mirror(
                qubits,
                self.half_depth,
                self.p_cnot,
                derive_seed(self.seed, &[STREAM_INSTANCE, qubits as u64, trial as u64]),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct SweepPoint {
    qubits: usize,
    degree: u32,
    delta: u32,
    chunks: ChunkSpec,
    s_tot: u64,
}

impl SweepPoint {
    fn config(&self, strategy: Strategy, depth: usize, mode: FoldMode) -> MitigationConfig {
        let config = match strategy {
            Strategy::Lre => {
                let chunks = match self.chunks {
                    ChunkSpec::Full => depth,
                    ChunkSpec::Fixed(l) => l,
                };
                MitigationConfig::lre(self.degree, chunks, self.delta, self.s_tot)
            }
            Strategy::Re => MitigationConfig::re(self.degree, self.delta, self.s_tot),
            Strategy::Unmitigated => MitigationConfig::unmitigated(self.s_tot),
        };
        config.with_mode(mode)
    }
}

/// One mitigated estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub sweep_value: u64,
    pub strategy: Strategy,
    pub trial: usize,
    pub seed: u64,
    pub value: f64,
    pub exact_value: f64,
    pub gamma: f64,
}

/// Statistics over trials for one (sweep value, strategy) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub family: Family,
    pub sweep_var: SweepVar,
    pub sweep_value: u64,
    pub strategy: Strategy,
    pub d: u32,
    pub l: usize,
    pub delta: u32,
    pub s_tot: u64,
    pub trials: usize,
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std: f64,
    pub mean_abs_error: f64,
    /// `(RE error − LRE error) / LRE error × 100`, on LRE rows when RE also ran.
    pub improvement_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub rows: Vec<StatsRow>,
    pub trials: Vec<TrialRecord>,
}

impl ExperimentReport {
    pub fn row(&self, sweep_value: u64, strategy: Strategy) -> Option<&StatsRow> {
        self.rows
            .iter()
            .find(|r| r.sweep_value == sweep_value && r.strategy == strategy)
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> Result<()> {
        write_csv(&self.rows, out)
    }
}

pub fn write_csv<W: io::Write>(rows: &[StatsRow], out: W) -> Result<()> {
    let io_err = |e: csv::Error| LreError::InvalidConfig(format!("csv output failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| LreError::InvalidConfig(format!("csv output failed: {e}")))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let backend = SimulatorBackend::new(spec.noise, Observable::ZeroProjector).cached();

    struct Job {
        value: u64,
        point: SweepPoint,
        strategy: Strategy,
        trial: usize,
    }
    let mut jobs = Vec::new();
    for &value in &spec.values {
        let point = spec.point(value)?;
        for &strategy in &spec.strategies {
            for trial in 0..spec.trials {
                jobs.push(Job {
                    value,
                    point,
                    strategy,
                    trial,
                });
            }
        }
    }

    let records: Vec<(TrialRecord, MitigationConfig)> = jobs
        .par_iter()
        .map(|job| {
            let circuit = spec.instance(job.point.qubits, job.trial);
            let config = job.point.config(job.strategy, circuit.depth(), spec.mode);
            let seed = derive_seed(spec.seed, &[STREAM_SAMPLING, job.trial as u64]);
            let result = mitigate(&backend, &circuit, &config, seed)?;
            Ok((
                TrialRecord {
                    sweep_value: job.value,
                    strategy: job.strategy,
                    trial: job.trial,
                    seed,
                    value: result.value,
                    exact_value: result.exact_value,
                    gamma: result.budget.gamma,
                },
                config,
            ))
        })
        .collect::<Result<_>>()?;

    let mut rows: Vec<StatsRow> = records
        .chunks(spec.trials)
        .map(|group| {
            let (first, config) = &group[0];
            let values: Vec<f64> = group.iter().map(|(r, _)| r.value).collect();
            let (l, d) = config.extrapolation();
            StatsRow {
                family: spec.family,
                sweep_var: spec.sweep,
                sweep_value: first.sweep_value,
                strategy: first.strategy,
                d,
                l,
                delta: config.delta,
                s_tot: config.s_tot,
                trials: values.len(),
                mean: mean(&values),
                std: sample_std(&values),
                mean_abs_error: mean(&values.iter().map(|v| (v - IDEAL_VALUE).abs()).collect::<Vec<_>>()),
                improvement_pct: None,
            }
        })
        .collect();

    for value in &spec.values {
        let err = |s: Strategy| {
            rows.iter()
                .find(|r| r.sweep_value == *value && r.strategy == s)
                .map(|r| r.mean_abs_error)
        };
        if let (Some(re), Some(lre)) = (err(Strategy::Re), err(Strategy::Lre)) {
            let pct = (re - lre) / lre * 100.0;
            for row in rows
                .iter_mut()
                .filter(|r| r.sweep_value == *value && r.strategy == Strategy::Lre)
            {
                row.improvement_pct = Some(pct);
            }
        }
    }

    Ok(ExperimentReport {
        spec: spec.clone(),
        rows,
        trials: records.into_iter().map(|(r, _)| r).collect(),
    })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}
