//! Criterion benchmarks for the `bhbound` kernels; see `benches/kernels.rs`.
