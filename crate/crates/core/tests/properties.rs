mod common;

use common::{arb_circuit, random_chunking, random_layered};
use lre_core::interpolation::{
    default_scale_factors, eta_by_determinants, eta_coefficients, interpolate_at, lre_combine, monomial_basis,
};
use lre_core::noise_sim::simulate_exact;
use lre_core::qasm_io::{emit_json, emit_qasm, parse_json, parse_qasm};
use lre_core::{allocate, fold_circuit, overhead, EtaCoefficients, FoldMode, NoiseModel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn qasm_round_trip(c in arb_circuit(5, 24)) {
        prop_assert_eq!(parse_qasm(&emit_qasm(&c)).unwrap(), c);
    }

    #[test]
    fn json_round_trip(c in arb_circuit(5, 24)) {
        prop_assert_eq!(parse_json(&emit_json(&c)).unwrap(), c);
    }

    #[test]
    fn json_keeps_arbitrary_layering(seed in any::<u64>(), width in 1usize..5, depth in 0usize..8) {
        let c = random_layered(&mut ChaCha8Rng::seed_from_u64(seed), width, depth);
        prop_assert_eq!(parse_json(&emit_json(&c)).unwrap(), c);
    }

    #[test]
    fn eta_sums_to_one(l in 1usize..=4, d in 0u32..=3, half in 1u32..=3) {
        let eta = eta_coefficients(&default_scale_factors(l, d, 2 * half).unwrap()).unwrap();
        prop_assert!((eta.sum() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn determinant_ratios_agree(l in 1usize..=3, d in 0u32..=3, half in 1u32..=3) {
        let config = default_scale_factors(l, d, 2 * half).unwrap();
        let a = eta_coefficients(&config).unwrap();
        let b = eta_by_determinants(&config).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn polynomials_are_reproduced(
        l in 1usize..=3,
        d in 0u32..=3,
        coeffs in proptest::collection::vec(-10.0f64..10.0, 20),
    ) {
        let config = default_scale_factors(l, d, 2).unwrap();
        let basis = monomial_basis(l, d);
        let f = |x: &[f64]| -> f64 {
            basis.evaluate(x).iter().zip(&coeffs).map(|(m, c)| m * c).sum()
        };
        let nodes: Vec<Vec<f64>> = config
            .vectors()
            .iter()
            .map(|v| v.iter().map(|&x| f64::from(x)).collect())
            .collect();
        let z: Vec<f64> = nodes.iter().map(|x| f(x)).collect();
        let eta = eta_coefficients(&config).unwrap();
        prop_assert!((lre_combine(&eta, &z).unwrap() - coeffs[0]).abs() < 1e-9);
        for (x, zi) in nodes.iter().zip(&z) {
            prop_assert!((interpolate_at(&config, &z, x).unwrap() - zi).abs() < 1e-10);
        }
    }

    #[test]
    fn folding_preserves_the_noiseless_state(
        seed in any::<u64>(),
        width in 1usize..=3,
        depth in 1usize..=6,
        local in any::<bool>(),
        lambdas in proptest::collection::vec(0u32..=3, 6),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_layered(&mut rng, width, depth);
        let chunking = random_chunking(&mut rng, depth);
        let lambdas: Vec<u32> = lambdas[..chunking.len()].iter().map(|k| 2 * k + 1).collect();
        let mode = if local { FoldMode::Local } else { FoldMode::Global };
        let folded = fold_circuit(&c, &chunking, &lambdas, mode).unwrap();
        let want: usize = chunking.sizes().iter().zip(&lambdas).map(|(s, &l)| s * l as usize).sum();
        prop_assert_eq!(folded.depth(), want);
        let noiseless = NoiseModel::noiseless();
        let a = simulate_exact(&c, &noiseless).unwrap();
        let b = simulate_exact(&folded, &noiseless).unwrap();
        prop_assert!(a.trace_distance(&b) < 1e-10);
    }

    #[test]
    fn allocation_is_exact(
        eta in proptest::collection::vec(-5.0f64..5.0, 1..40),
        extra in 0u64..2_000_000,
    ) {
        prop_assume!(eta.iter().any(|e| e.abs() > 1e-12));
        let eta = EtaCoefficients::new(eta);
        let s_tot = eta.len() as u64 + extra;
        let shots = allocate(&eta, s_tot).unwrap();
        prop_assert_eq!(shots.iter().sum::<u64>(), s_tot);
        prop_assert!(shots.iter().all(|&s| s >= 1));
    }

    #[test]
    fn equal_split_never_beats_optimal(l in 1usize..=4, d in 0u32..=3, half in 1u32..=3) {
        let eta = eta_coefficients(&default_scale_factors(l, d, 2 * half).unwrap()).unwrap();
        let report = overhead(&eta, 1_000_000).unwrap();
        prop_assert!(report.c_tilde >= report.c * (1.0 - 1e-12));
    }
}
