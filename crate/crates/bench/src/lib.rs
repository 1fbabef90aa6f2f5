//! Benchmarks for `transnum`; see `benches/`.
