//! Thread-backed executors, timed benchmark campaigns, file formats, result
//! analysis and the `multibench` command line, on top of `multibench-core`.

pub mod analysis;
pub mod cli;
pub mod executors;
pub mod formats;
pub mod report;
pub mod runner;
pub mod validate;

pub use executors::{available_threads, spawn_per_item, worker_pool, ExecError, ThreadedExecutor};
pub use runner::{run_benchmark, run_benchmark_with, BenchError, BenchSpec, MeasurementRecord};
