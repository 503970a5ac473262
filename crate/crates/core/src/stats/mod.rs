//! Statistics used to compare paradigms.

mod interval;
pub mod special;
mod speedup;
mod table;
mod wilcoxon;

pub use interval::{fieller_ci, mean, mean_ci, sample_variance, ConfidenceInterval};
pub use speedup::{speedup_curve, BaselineKind, SpeedupCurve, SpeedupPoint};
pub use table::{invert_for_speedup, normalize, rating, Metric, MetricTable};
pub use wilcoxon::{
    pairwise, wilcoxon_signed_rank, PairwiseResult, SignedRankTest, Strength, EXACT_LIMIT, SIGNIFICANT, TENDS,
};

use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq)]
pub enum StatsError {
    InsufficientData {
        needed: usize,
        found: usize,
    },
    InvalidLevel(f64),
    NonFinite,
    NonPositive {
        paradigm: String,
        problem: String,
        value: f64,
    },
    MissingCell {
        paradigm: String,
        problem: String,
    },
    UnknownLabel(String),
    EmptyTable,
    /// Raw speedups must be inverted before they can be rated.
    WrongMetric(Metric),
    /// Single-thread parallel samples are required for a speedup curve.
    MissingBaseline,
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::InsufficientData { needed, found } => {
                write!(f, "insufficient data: need at least {needed} samples, got {found}")
            }
            StatsError::InvalidLevel(l) => write!(f, "confidence level {l} outside (0, 1)"),
            StatsError::NonFinite => f.write_str("samples must be finite"),
            StatsError::NonPositive { paradigm, problem, value } => {
                write!(f, "value {value} for ({paradigm}, {problem}) is not positive")
            }
            StatsError::MissingCell { paradigm, problem } => {
                write!(f, "missing value for ({paradigm}, {problem})")
            }
            StatsError::UnknownLabel(l) => write!(f, "unknown label {l:?}"),
            StatsError::EmptyTable => f.write_str("table has no paradigms or problems"),
            StatsError::WrongMetric(m) => write!(f, "metric {m} cannot be rated directly"),
            StatsError::MissingBaseline => f.write_str("no single-thread samples for the speedup baseline"),
        }
    }
}

impl core::error::Error for StatsError {}
