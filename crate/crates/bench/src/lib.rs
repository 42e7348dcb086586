//! Benchmarks for the sign kernels and dense fermionic operations live in `benches/`.
