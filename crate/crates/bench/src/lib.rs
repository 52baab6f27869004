//! Benchmarks for hmts-core live in `benches/`.
