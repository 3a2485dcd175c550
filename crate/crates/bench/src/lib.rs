//! Criterion benchmarks for the samplers and diagnostics live in `benches/`.
