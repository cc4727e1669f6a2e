//! Criterion benchmarks for the `gowers-core` kernels; see `benches/`.
