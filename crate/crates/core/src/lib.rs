//! Pure algorithmic core of the multicore benchmark suite.
//!
//! Everything here depends only on [`core`] and [`alloc`]:
//!
//! * [`kernels`]: the six benchmark problems (randmat, thresh, winnow, outer,
//!   product, chain), generic over an [`exec::Executor`].
//! * [`exec`]: the executor contract plus the skeleton layer (parallel for,
//!   reduce, scan, fork-join) built on top of it. Thread-backed executors live
//!   in the `multibench` crate.
//! * [`stats`]: confidence intervals, Fieller ratio intervals, the Wilcoxon
//!   signed-rank test and the average relative rating.
//! * [`report`]: ordering graphs, expert/non-expert diff tables, DOT output.
//! * [`coding_time`]: commit-log protocol and coding-time accounting.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coding_time;
pub mod exec;
pub mod kernels;
pub mod report;
pub mod stats;

pub use exec::{ExecStrategy, Executor, IndexRange, Sequential, StrategyKind};
pub use kernels::{
    IntMatrix, KernelError, KernelInput, KernelOutput, KernelParams, Mask, PointList, Problem, RealMatrix, RealVector,
};
