//! Benchmark-only crate; see `benches/core_ops.rs`.

/// Re-exported so the bench target has a stable anchor to the core crate.
pub use bohrnet_core as core;
