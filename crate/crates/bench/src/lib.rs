//! Benchmark-only crate; see `benches/speed.rs` for the measurements.
