use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use asis_panel::diagnostics::{acf, ess, mcse_batch_means};
use asis_panel::{generate_synthetic, run_chain, ModelSpec, RunConfig, SamplerScheme};

fn diagnostics(c: &mut Criterion) {
    // a slowly mixing SA chain so ESS has to walk many lags
    let spec = ModelSpec::with_variances(100.0, 1.0).unwrap();
    let data = generate_synthetic(&spec, 0.0, 10, 10, 2).unwrap();
    let cfg = RunConfig {
        iterations: 10_000,
        burn_in: 1_000,
        seed: 4,
    };
    let out = run_chain(SamplerScheme::Sa, &data, &spec, &cfg).unwrap();
    let mu = out.mu();

    c.bench_function("acf_lag50", |b| b.iter(|| acf(black_box(mu), 50).unwrap()));
    c.bench_function("mcse_batch_means", |b| {
        b.iter(|| mcse_batch_means(black_box(mu), None).unwrap())
    });
    c.bench_function("ess", |b| b.iter(|| ess(black_box(mu)).unwrap()));
}

criterion_group!(benches, diagnostics);
criterion_main!(benches);
