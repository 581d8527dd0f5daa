//! Criterion benchmarks for `chiral-blocks`; see `benches/`.
