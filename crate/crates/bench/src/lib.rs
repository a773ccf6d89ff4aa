//! Benchmark workloads; see `benches/pipeline.rs`.
