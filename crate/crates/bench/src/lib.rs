//! Benchmarks for the simulator live in `benches/`.
