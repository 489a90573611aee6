//! Replicated comparison of the `kY`, `kX` and `kPsi` kernels on an embedded
//! Hartmann6 objective, with machine-readable outputs.

pub mod config;
pub mod error;
pub mod runner;
pub mod summary;

pub use config::{parse_kernels, BenchmarkConfig};
pub use error::{BenchError, Result};
pub use runner::{run_benchmark, BenchmarkReport};
pub use summary::{quantile_type7, read_gap_rows, summarize, summarize_files, GapRow, KernelStats, Summary};
