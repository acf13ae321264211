//! Criterion benchmarks for `tmode-core`; see `benches/`.
