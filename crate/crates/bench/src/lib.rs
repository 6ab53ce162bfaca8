//! Criterion benchmarks for the nonlinear turbo code toolkit; see `benches/`.
