//! End-to-end mitigation: LRE, single-variable RE, and the unmitigated baseline.
//!
//! Coefficients are computed before anything is executed, so a singular node
//! set fails before any simulation. Circuit evaluations go through an
//! [`ExpectationBackend`] and run in parallel; results are joined in node order.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{overhead, BudgetReport};
use crate::circuit::{chunk_circuit, fold_circuit, Circuit, FoldMode};
use crate::error::{LreError, Result};
use crate::interpolation::{default_scale_factors, EtaCoefficients, ExtrapolationPlan, ScaleFactorConfig};
use crate::noise_sim::{
    sample_estimate, simulate_exact_with_limit, ExpectationEstimate, NoiseModel, Observable, DEFAULT_MAX_QUBITS,
};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Lre,
    Re,
    Unmitigated,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Unmitigated, Strategy::Re, Strategy::Lre];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Lre => "lre",
            Strategy::Re => "re",
            Strategy::Unmitigated => "unmitigated",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = LreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lre" => Ok(Strategy::Lre),
            "re" => Ok(Strategy::Re),
            "unmitigated" => Ok(Strategy::Unmitigated),
            other => Err(LreError::InvalidConfig(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Hyperparameters of one mitigation run. `s_tot == 0` selects exact mode:
/// every expectation value is evaluated without shot noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MitigationConfig {
    pub strategy: Strategy,
    pub degree: u32,
    pub chunks: usize,
    pub delta: u32,
    pub s_tot: u64,
    pub mode: FoldMode,
}

impl MitigationConfig {
    pub fn lre(degree: u32, chunks: usize, delta: u32, s_tot: u64) -> Self {
        Self {
            strategy: Strategy::Lre,
            degree,
            chunks,
            delta,
            s_tot,
            mode: FoldMode::Local,
        }
    }

    pub fn re(degree: u32, delta: u32, s_tot: u64) -> Self {
        Self {
            strategy: Strategy::Re,
            chunks: 1,
            ..Self::lre(degree, 1, delta, s_tot)
        }
    }

    pub fn unmitigated(s_tot: u64) -> Self {
        Self {
            strategy: Strategy::Unmitigated,
            ..Self::lre(0, 1, 2, s_tot)
        }
    }

    pub fn with_mode(mut self, mode: FoldMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn is_exact(&self) -> bool {
        self.s_tot == 0
    }

    /// `(chunks, degree)` actually used by the extrapolation.
    pub fn extrapolation(&self) -> (usize, u32) {
        match self.strategy {
            Strategy::Lre => (self.chunks, self.degree),
            Strategy::Re => (1, self.degree),
            Strategy::Unmitigated => (1, 0),
        }
    }

    pub fn validate(&self, circuit: &Circuit) -> Result<()> {
        if self.strategy == Strategy::Unmitigated {
            return Ok(());
        }
        if self.degree < 1 {
            return Err(LreError::InvalidConfig("extrapolation degree must be >= 1".into()));
        }
        if self.delta < 2 || self.delta % 2 != 0 {
            return Err(LreError::InvalidDelta(self.delta));
        }
        let (chunks, _) = self.extrapolation();
        if chunks == 0 || chunks > circuit.depth() {
            return Err(LreError::InvalidChunkCount {
                chunks,
                depth: circuit.depth(),
            });
        }
        Ok(())
    }

    fn scale_factors(&self) -> Result<ScaleFactorConfig> {
        let (chunks, degree) = self.extrapolation();
        let delta = if self.strategy == Strategy::Unmitigated { 2 } else { self.delta };
        default_scale_factors(chunks, degree, delta)
    }
}

/// One noise-scaled circuit handed to a backend.
#[derive(Debug, Clone, Copy)]
pub struct CircuitJob<'a> {
    pub index: usize,
    pub circuit: &'a Circuit,
    pub scale_factors: &'a [u32],
    /// 0 requests the exact value.
    pub shots: u64,
    pub seed: u64,
}

/// Source of noisy expectation values.
pub trait ExpectationBackend: Sync {
    fn estimate(&self, job: &CircuitJob<'_>) -> Result<ExpectationEstimate>;
}

/// The embedded density-matrix simulator. With [`SimulatorBackend::cached`],
/// outcome distributions are memoized per circuit, which pays off when the
/// same circuits are re-sampled across trials.
pub struct SimulatorBackend {
    noise: NoiseModel,
    observable: Observable,
    max_qubits: usize,
    cache: Option<Mutex<HashMap<Circuit, Arc<Vec<f64>>>>>,
}

impl SimulatorBackend {
    pub fn new(noise: NoiseModel, observable: Observable) -> Self {
        Self {
            noise,
            observable,
            max_qubits: DEFAULT_MAX_QUBITS,
            cache: None,
        }
    }

    pub fn cached(mut self) -> Self {
        self.cache = Some(Mutex::new(HashMap::new()));
        self
    }

    pub fn with_max_qubits(mut self, max_qubits: usize) -> Self {
        self.max_qubits = max_qubits;
        self
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    fn probabilities(&self, circuit: &Circuit) -> Result<Arc<Vec<f64>>> {
        let compute = || -> Result<Arc<Vec<f64>>> {
            let rho = simulate_exact_with_limit(circuit, &self.noise, self.max_qubits)?;
            Ok(Arc::new(rho.probabilities()))
        };
        let Some(cache) = &self.cache else {
            return compute();
        };
        if let Some(hit) = cache.lock().expect("cache lock").get(circuit) {
            return Ok(Arc::clone(hit));
        }
        let probs = compute()?;
        cache
            .lock()
            .expect("cache lock")
            .insert(circuit.clone(), Arc::clone(&probs));
        Ok(probs)
    }
}

impl ExpectationBackend for SimulatorBackend {
    fn estimate(&self, job: &CircuitJob<'_>) -> Result<ExpectationEstimate> {
        let probs = self.probabilities(job.circuit)?;
        sample_estimate(&probs, &self.observable, job.shots, job.seed)
    }
}

/// Returns `f(λ)` exactly, ignoring the circuit and the shot count.
pub struct SyntheticBackend<F> {
    f: F,
}

impl<F> SyntheticBackend<F>
where
    F: Fn(&[u32]) -> f64 + Sync,
{
    pub fn new(f: F) -> Self {
        Self { f }
    }
}

impl<F> ExpectationBackend for SyntheticBackend<F>
where
    F: Fn(&[u32]) -> f64 + Sync,
{
    fn estimate(&self, job: &CircuitJob<'_>) -> Result<ExpectationEstimate> {
        Ok(ExpectationEstimate::exact((self.f)(job.scale_factors)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEstimate {
    pub lambda: Vec<u32>,
    pub shots: u64,
    pub estimate: f64,
    pub exact_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigatedResult {
    pub strategy: Strategy,
    /// `Σ η_i · raw[i].estimate`.
    pub value: f64,
    /// The same combination over the exact (shot-free) values.
    pub exact_value: f64,
    pub eta: EtaCoefficients,
    pub scale_factors: ScaleFactorConfig,
    pub raw: Vec<RawEstimate>,
    pub budget: BudgetReport,
}

/// Runs the strategy named in `config` against `backend`.
pub fn mitigate<B: ExpectationBackend + ?Sized>(
    backend: &B,
    circuit: &Circuit,
    config: &MitigationConfig,
    seed: u64,
) -> Result<MitigatedResult> {
    config.validate(circuit)?;
    let plan = ExtrapolationPlan::new(config.scale_factors()?)?;
    let eta = plan.eta().clone();
    let budget = if config.is_exact() {
        BudgetReport::exact(&eta)
    } else {
        overhead(&eta, config.s_tot)?
    };

    let vectors = plan.config().vectors();
    let folded: Vec<Circuit> = if config.strategy == Strategy::Unmitigated {
        vec![circuit.clone()]
    } else {
        let chunking = chunk_circuit(circuit, config.extrapolation().0)?;
        vectors
            .iter()
            .map(|lambdas| fold_circuit(circuit, &chunking, lambdas, config.mode))
            .collect::<Result<_>>()?
    };

    let estimates: Vec<ExpectationEstimate> = folded
        .par_iter()
        .enumerate()
        .map(|(index, c)| {
            backend.estimate(&CircuitJob {
                index,
                circuit: c,
                scale_factors: &vectors[index],
                shots: budget.allocations[index],
                seed: derive_seed(seed, &[index as u64]),
            })
        })
        .collect::<Result<_>>()?;

    let value = eta.values().iter().zip(&estimates).map(|(e, z)| e * z.value).sum();
    let exact_value = eta
        .values()
        .iter()
        .zip(&estimates)
        .map(|(e, z)| e * z.exact_value)
        .sum();
    let raw = vectors
        .iter()
        .zip(&estimates)
        .map(|(lambda, z)| RawEstimate {
            lambda: lambda.clone(),
            shots: z.shots,
            estimate: z.value,
            exact_estimate: z.exact_value,
        })
        .collect();

    Ok(MitigatedResult {
        strategy: config.strategy,
        value,
        exact_value,
        eta,
        scale_factors: plan.config().clone(),
        raw,
        budget,
    })
}

pub fn run_lre(
    circuit: &Circuit,
    observable: &Observable,
    config: &MitigationConfig,
    noise: &NoiseModel,
    seed: u64,
) -> Result<MitigatedResult> {
    let backend = SimulatorBackend::new(*noise, observable.clone());
    mitigate(&backend, circuit, &config.with_strategy(Strategy::Lre), seed)
}

/// Single-variable RE: one chunk, scale factors `1, 1+Δ, …, 1+dΔ`, local folding.
pub fn run_re(
    circuit: &Circuit,
    observable: &Observable,
    degree: u32,
    delta: u32,
    s_tot: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<MitigatedResult> {
    let backend = SimulatorBackend::new(*noise, observable.clone());
    mitigate(&backend, circuit, &MitigationConfig::re(degree, delta, s_tot), seed)
}

pub fn run_unmitigated(
    circuit: &Circuit,
    observable: &Observable,
    s_tot: u64,
    noise: &NoiseModel,
    seed: u64,
) -> Result<ExpectationEstimate> {
    let backend = SimulatorBackend::new(*noise, observable.clone());
    let result = mitigate(&backend, circuit, &MitigationConfig::unmitigated(s_tot), seed)?;
    let raw = &result.raw[0];
    Ok(ExpectationEstimate {
        value: raw.estimate,
        shots: raw.shots,
        exact_value: raw.exact_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::ghz_mirror;

    #[test]
    fn noiseless_fixed_point() {
        let c = ghz_mirror(3);
        let obs = Observable::ZeroProjector;
        let noise = NoiseModel::noiseless();
        let r = run_lre(&c, &obs, &MitigationConfig::lre(2, 6, 2, 0), &noise, 1).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = run_re(&c, &obs, 1, 2, 0, &noise, 1).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let r = run_lre(&c, &obs, &MitigationConfig::lre(1, 6, 2, 100_000), &noise, 1).unwrap();
        // All node values are exactly 1 without noise, so sampling cannot move them.
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn re_coefficients() {
        let c = ghz_mirror(2);
        let noise = NoiseModel::default();
        let r = run_re(&c, &Observable::ZeroProjector, 1, 2, 0, &noise, 0).unwrap();
        assert_eq!(r.scale_factors.vectors(), &[vec![1], vec![3]]);
        assert!((r.eta.values()[0] - 1.5).abs() < 1e-12 && (r.eta.values()[1] + 0.5).abs() < 1e-12);
        let r = run_re(&c, &Observable::ZeroProjector, 2, 2, 0, &noise, 0).unwrap();
        let want = [15.0 / 8.0, -5.0 / 4.0, 3.0 / 8.0];
        for (g, w) in r.eta.values().iter().zip(want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn single_chunk_lre_is_re() {
        let c = ghz_mirror(3);
        let obs = Observable::ZeroProjector;
        let noise = NoiseModel::default();
        for d in 1..=3 {
            let lre = run_lre(&c, &obs, &MitigationConfig::lre(d, 1, 2, 0), &noise, 5).unwrap();
            let re = run_re(&c, &obs, d, 2, 0, &noise, 5).unwrap();
            assert_eq!(lre.eta, re.eta);
            assert_eq!(lre.value, re.value);
        }
    }

    #[test]
    fn synthetic_polynomial_is_recovered() {
        // f(λ) = 0.9 - 0.02 λ₁ + 0.03 λ₂ λ₃ - 0.004 λ₁² + 0.01 λ₃
        let f = |l: &[u32]| {
            let x: Vec<f64> = l.iter().map(|&v| f64::from(v)).collect();
            0.9 - 0.02 * x[0] + 0.03 * x[1] * x[2] - 0.004 * x[0] * x[0] + 0.01 * x[2]
        };
        let backend = SyntheticBackend::new(f);
        let c = ghz_mirror(2); // depth 4
        let config = MitigationConfig::lre(2, 3, 2, 0);
        let r = mitigate(&backend, &c, &config, 0).unwrap();
        assert!((r.value - 0.9).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn budget_discipline() {
        let c = ghz_mirror(2);
        let obs = Observable::ZeroProjector;
        let noise = NoiseModel::default();
        for config in [
            MitigationConfig::lre(2, 4, 2, 10_000),
            MitigationConfig::re(2, 2, 10_000),
            MitigationConfig::unmitigated(10_000),
        ] {
            let backend = SimulatorBackend::new(noise, obs.clone());
            let r = mitigate(&backend, &c, &config, 3).unwrap();
            assert_eq!(r.raw.iter().map(|x| x.shots).sum::<u64>(), 10_000);
            let recombined: f64 = r.eta.values().iter().zip(&r.raw).map(|(e, x)| e * x.estimate).sum();
            assert_eq!(recombined, r.value);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let c = ghz_mirror(2);
        let obs = Observable::ZeroProjector;
        let noise = NoiseModel::default();
        let config = MitigationConfig::lre(2, 4, 2, 50_000);
        let a = run_lre(&c, &obs, &config, &noise, 11).unwrap();
        let b = run_lre(&c, &obs, &config, &noise, 11).unwrap();
        assert_eq!(a, b);
        let other = run_lre(&c, &obs, &config, &noise, 12).unwrap();
        assert_ne!(a.value, other.value);
    }

    #[test]
    fn unmitigated_baseline() {
        let obs = Observable::ZeroProjector;
        let ideal = run_unmitigated(&ghz_mirror(3), &obs, 0, &NoiseModel::noiseless(), 0).unwrap();
        assert!((ideal.value - 1.0).abs() < 1e-12);
        let noisy = run_unmitigated(&ghz_mirror(2), &obs, 0, &NoiseModel::default(), 0).unwrap();
        assert!(noisy.exact_value < 1.0);
        let a = run_unmitigated(&ghz_mirror(2), &obs, 1000, &NoiseModel::default(), 4).unwrap();
        let b = run_unmitigated(&ghz_mirror(2), &obs, 1000, &NoiseModel::default(), 4).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shots, 1000);
    }

    #[test]
    fn invalid_configs() {
        let c = ghz_mirror(2);
        let obs = Observable::ZeroProjector;
        let noise = NoiseModel::default();
        let run = |config: MitigationConfig| run_lre(&c, &obs, &config, &noise, 0);
        assert!(matches!(run(MitigationConfig::lre(2, 5, 2, 0)), Err(LreError::InvalidChunkCount { .. })));
        assert!(matches!(run(MitigationConfig::lre(2, 0, 2, 0)), Err(LreError::InvalidChunkCount { .. })));
        assert!(matches!(run(MitigationConfig::lre(0, 2, 2, 0)), Err(LreError::InvalidConfig(_))));
        assert!(matches!(run(MitigationConfig::lre(1, 2, 3, 0)), Err(LreError::InvalidDelta(3))));
        assert!(matches!(
            run(MitigationConfig::lre(2, 4, 2, 10)),
            Err(LreError::BudgetTooSmall { s_tot: 10, circuits: 15 })
        ));
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("pec".parse::<Strategy>().is_err());
    }
}
