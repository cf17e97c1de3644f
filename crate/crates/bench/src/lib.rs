//! Criterion benchmarks for the `qpolar` decoders; see `benches/`.
