//! Criterion benchmarks for `proxmcmc`; see `benches/kernels.rs`.
