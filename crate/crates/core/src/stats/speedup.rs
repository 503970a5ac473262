use alloc::string::String;
use alloc::vec::Vec;

use super::{fieller_ci, mean, ConfidenceInterval, StatsError};

/// Which single-thread time served as the speedup baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    Sequential,
    ParallelOn1Thread,
}

impl BaselineKind {
    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::Sequential => "sequential",
            BaselineKind::ParallelOn1Thread => "parallel-on-1-thread",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedupPoint {
    pub threads: usize,
    pub speedup: f64,
    /// Fieller interval; absent when either side has fewer than 2 samples.
    pub ci: Option<ConfidenceInterval>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedupCurve {
    pub paradigm: String,
    pub problem: String,
    pub baseline: BaselineKind,
    /// Mean of the baseline samples.
    pub baseline_seconds: f64,
    pub points: Vec<SpeedupPoint>,
}

/// Speedup relative to the fastest single-thread run.
///
/// The baseline is whichever of the sequential samples and the parallel
/// samples at one thread has the smaller mean (sequential on ties); at least
/// one of them must be present. Points are returned in ascending thread
/// order.
pub fn speedup_curve(
    paradigm: &str,
    problem: &str,
    seq: Option<&[f64]>,
    par_by_threads: &[(usize, Vec<f64>)],
    level: f64,
) -> Result<SpeedupCurve, StatsError> {
    if par_by_threads.iter().any(|(_, s)| s.is_empty()) {
        return Err(StatsError::InsufficientData { needed: 1, found: 0 });
    }
    let single = par_by_threads.iter().find(|(t, _)| *t == 1).map(|(_, s)| s.as_slice());
    let (baseline, base) = match (seq.filter(|s| !s.is_empty()), single) {
        (Some(s), Some(p)) if mean(p) < mean(s) => (BaselineKind::ParallelOn1Thread, p),
        (Some(s), _) => (BaselineKind::Sequential, s),
        (None, Some(p)) => (BaselineKind::ParallelOn1Thread, p),
        (None, None) => return Err(StatsError::MissingBaseline),
    };
    let base_mean = mean(base);
    let mut points: Vec<SpeedupPoint> = par_by_threads
        .iter()
        .map(|(threads, samples)| {
            let ci = if base.len() >= 2 && samples.len() >= 2 { Some(fieller_ci(base, samples, level)?) } else { None };
            Ok(SpeedupPoint { threads: *threads, speedup: base_mean / mean(samples), ci })
        })
        .collect::<Result<_, StatsError>>()?;
    points.sort_by_key(|p| p.threads);
    Ok(SpeedupCurve {
        paradigm: paradigm.into(),
        problem: problem.into(),
        baseline,
        baseline_seconds: base_mean,
        points,
    })
}
