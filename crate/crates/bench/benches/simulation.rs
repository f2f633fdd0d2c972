use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lre_bench::{ghz_fixtures, random_fixture};
use lre_core::noise_sim::simulate_exact;
use lre_core::{mitigate, protocol::SimulatorBackend, MitigationConfig, NoiseModel, Observable};

fn density_matrix(c: &mut Criterion) {
    let noise = NoiseModel::default();
    let mut group = c.benchmark_group("simulate_exact");
    for (n, circuit) in ghz_fixtures() {
        group.bench_with_input(BenchmarkId::new("ghz", n), &circuit, |b, circ| {
            b.iter(|| simulate_exact(circ, &noise).unwrap())
        });
    }
    let circuit = random_fixture(5);
    group.bench_function("random_5", |b| b.iter(|| simulate_exact(&circuit, &noise).unwrap()));
    group.finish();
}

fn full_protocol(c: &mut Criterion) {
    let mut group = c.benchmark_group("mitigate_exact");
    group.sample_size(10);
    for (n, circuit) in ghz_fixtures().into_iter().take(3) {
        let config = MitigationConfig::lre(2, circuit.depth(), 2, 0);
        group.bench_with_input(BenchmarkId::new("ghz_lre", n), &circuit, |b, circ| {
            b.iter(|| {
                let backend = SimulatorBackend::new(NoiseModel::default(), Observable::ZeroProjector);
                mitigate(&backend, circ, &config, 0).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, density_matrix, full_protocol);
criterion_main!(benches);
