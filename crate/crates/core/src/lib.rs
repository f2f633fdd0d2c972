//! Layerwise Richardson extrapolation for quantum error mitigation.
//!
//! A layered circuit is split into chunks, each chunk is noise-amplified by
//! unitary folding with its own odd scale factor, the resulting ensemble is
//! evaluated on a noisy density-matrix simulator, and the zero-noise value is
//! recovered as a fixed linear combination of the noisy estimates.
//!
//! ```
//! use lre_core::{bench::ghz_mirror, run_lre, MitigationConfig, NoiseModel, Observable};
//!
//! let circuit = ghz_mirror(2);
//! let config = MitigationConfig::lre(2, circuit.depth(), 2, 0);
//! let noise = NoiseModel::default();
//! let result = run_lre(&circuit, &Observable::ZeroProjector, &config, &noise, 7).unwrap();
//! assert!((result.value - 1.0).abs() < 0.05);
//! ```

pub mod bench;
pub mod budget;
pub mod circuit;
mod error;
pub mod interpolation;
pub mod linalg;
pub mod noise_sim;
pub mod protocol;
pub mod qasm_io;
pub mod seed;

pub use budget::{allocate, overhead, BudgetReport};
pub use circuit::{chunk_circuit, fold_circuit, Chunking, Circuit, FoldMode, Gate, GateKind, Layer};
pub use error::{LreError, Result};
pub use interpolation::{
    default_scale_factors, eta_coefficients, interpolate_at, lre_combine, EtaCoefficients, ExtrapolationPlan,
    ScaleFactorConfig,
};
pub use noise_sim::{DensityMatrix, ExpectationEstimate, NoiseModel, Observable};
pub use protocol::{
    mitigate, run_lre, run_re, run_unmitigated, ExpectationBackend, MitigatedResult, MitigationConfig, Strategy,
};
