use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use asis_panel::sampler::{chain_rng, step};
use asis_panel::{generate_synthetic, ChainState, ModelSpec, SamplerScheme};

fn sweeps(c: &mut Criterion) {
    let spec = ModelSpec::with_variances(10.0, 1.0).unwrap();
    let mut group = c.benchmark_group("sweep");
    for n in [10usize, 500] {
        let data = generate_synthetic(&spec, 0.0, n, 10, 1).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        for scheme in SamplerScheme::ALL {
            group.bench_with_input(BenchmarkId::new(scheme.key(), n), &data, |b, data| {
                let mut state = ChainState::initial(data, &spec);
                let mut rng = chain_rng(7);
                b.iter(|| {
                    step(scheme, &mut state, data, &spec, &mut rng).unwrap();
                    black_box(state.mu_alpha)
                });
            });
        }
    }
    group.finish();
}

// one full replication-sized chain: 10,000 sweeps at N = 500
fn chain(c: &mut Criterion) {
    let spec = ModelSpec::with_variances(10.0, 1.0).unwrap();
    let data = generate_synthetic(&spec, 0.0, 500, 10, 1).unwrap();
    let cfg = asis_panel::RunConfig {
        iterations: 10_000,
        burn_in: 1_000,
        seed: 3,
    };
    let mut group = c.benchmark_group("chain_n500");
    group.sample_size(10);
    group.bench_function("asis-sa-aa", |b| {
        b.iter(|| asis_panel::run_chain(SamplerScheme::AsisSaAa, &data, &spec, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sweeps, chain);
criterion_main!(benches);
