//! Timed benchmark campaigns.

use std::path::{Path, PathBuf};
use std::time::Instant;

use multibench_core::coding_time::Variant;
use multibench_core::kernels::{generate_input, run_kernel};
use multibench_core::{ExecStrategy, Executor, KernelError, KernelInput, KernelParams, Problem, StrategyKind};
use serde::{Deserialize, Serialize};

use crate::executors::{available_threads, ExecError, ThreadedExecutor};
use crate::formats::{read_input, FormatError};

/// One timed kernel execution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub paradigm: String,
    pub problem: String,
    pub variant: String,
    pub threads: usize,
    pub rep: usize,
    pub seconds: f64,
}

impl MeasurementRecord {
    pub fn new(paradigm: &str, problem: &str, variant: &str, threads: usize, rep: usize, seconds: f64) -> Self {
        MeasurementRecord {
            paradigm: paradigm.into(),
            problem: problem.into(),
            variant: variant.into(),
            threads,
            rep,
            seconds,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchSpec {
    pub problem: Problem,
    pub variant: Variant,
    pub strategy: StrategyKind,
    /// Overrides the default grain when set.
    pub grain: Option<usize>,
    pub thread_counts: Vec<usize>,
    pub reps: usize,
    pub warmups: usize,
    pub size: KernelParams,
    /// Synthesize inputs in memory instead of reading `<input_dir>/<problem>.in`.
    pub is_bench: bool,
    pub input_dir: PathBuf,
}

impl BenchSpec {
    pub fn new(problem: Problem, strategy: StrategyKind, thread_counts: Vec<usize>) -> Self {
        BenchSpec {
            problem,
            variant: if strategy == StrategyKind::Sequential { Variant::Seq } else { Variant::Par },
            strategy,
            grain: None,
            thread_counts,
            reps: 30,
            warmups: 2,
            size: KernelParams::default(),
            is_bench: true,
            input_dir: PathBuf::from("."),
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let invalid = |m: &str| Err(BenchError::InvalidSpec(m.into()));
        if self.reps == 0 {
            return invalid("reps must be at least 1");
        }
        if self.thread_counts.is_empty() || self.thread_counts.contains(&0) {
            return invalid("thread counts must be non-empty and at least 1");
        }
        if self.grain == Some(0) {
            return invalid("grain must be at least 1");
        }
        self.size.validate().map_err(|e| BenchError::InvalidSpec(e.to_string()))
    }

    /// Conditions worth reporting that do not stop the campaign.
    pub fn warnings(&self) -> Vec<String> {
        let cores = available_threads();
        match self.thread_counts.iter().max() {
            Some(&max) if max > cores => vec![format!(
                "{} threads requested but only {cores} logical cores are available; timings will be oversubscribed",
                max
            )],
            _ => Vec::new(),
        }
    }

    fn input_path(&self) -> PathBuf {
        self.input_dir.join(format!("{}.in", self.problem))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid benchmark specification: {0}")]
    InvalidSpec(String),
    #[error("input file {} is missing (pass --is_bench to synthesize inputs)", .0.display())]
    InputMissing(PathBuf),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error("{problem} input: {source}")]
    Input { problem: Problem, source: KernelError },
    #[error("{problem} on {threads} threads, {}: {source}", rep.map_or("warmup".to_string(), |r| format!("rep {r}")))]
    Kernel { problem: Problem, threads: usize, rep: Option<usize>, source: KernelError },
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Builds the kernel input, either synthesized or read from disk. Never part
/// of a timed region.
pub fn load_input(spec: &BenchSpec) -> Result<KernelInput, BenchError> {
    if spec.is_bench {
        return generate_input(spec.problem, &spec.size)
            .map_err(|source| BenchError::Input { problem: spec.problem, source });
    }
    let path = spec.input_path();
    read_input_file(spec.problem, &path)
}

pub fn read_input_file(problem: Problem, path: &Path) -> Result<KernelInput, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            BenchError::InputMissing(path.to_path_buf())
        } else {
            BenchError::Io { path: path.to_path_buf(), source }
        }
    })?;
    read_input(problem, &text).map_err(|source| BenchError::Format { path: path.to_path_buf(), source })
}

/// Runs the campaign with the library kernels.
pub fn run_benchmark(spec: &BenchSpec) -> Result<Vec<MeasurementRecord>, BenchError> {
    run_benchmark_with(spec, |input, ex| run_kernel(input, ex))
}

/// Runs the campaign with `kernel` standing in for the library kernels.
///
/// For each thread count: `warmups` untimed runs, then `reps` timed runs.
/// The timed region covers only the `kernel` call; input construction happens
/// once beforehand and the result is dropped after the clock stops.
pub fn run_benchmark_with<K, T>(spec: &BenchSpec, mut kernel: K) -> Result<Vec<MeasurementRecord>, BenchError>
where
    K: FnMut(&KernelInput, &dyn Executor) -> Result<T, KernelError>,
{
    spec.validate()?;
    let input = load_input(spec)?;
    let mut records = Vec::with_capacity(spec.thread_counts.len() * spec.reps);
    for &threads in &spec.thread_counts {
        let mut strategy = ExecStrategy::new(spec.strategy, threads);
        if let Some(g) = spec.grain {
            strategy = strategy.with_grain(g);
        }
        let ex = ThreadedExecutor::new(strategy)?;
        let fail = |rep, source| BenchError::Kernel { problem: spec.problem, threads, rep, source };
        for _ in 0..spec.warmups {
            drop(kernel(&input, &ex).map_err(|e| fail(None, e))?);
        }
        for rep in 0..spec.reps {
            let start = Instant::now();
            let out = kernel(&input, &ex);
            let elapsed = start.elapsed();
            drop(out.map_err(|e| fail(Some(rep), e))?);
            records.push(MeasurementRecord {
                paradigm: spec.strategy.name().into(),
                problem: spec.problem.name().into(),
                variant: spec.variant.name().into(),
                threads,
                rep,
                // A zero reading only means the clock's resolution was hit.
                seconds: elapsed.as_secs_f64().max(1e-9),
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(problem: Problem, strategy: StrategyKind) -> BenchSpec {
        BenchSpec {
            reps: 3,
            warmups: 1,
            size: KernelParams::square(40, 9, 50),
            ..BenchSpec::new(problem, strategy, vec![1, 2])
        }
    }

    #[test]
    fn record_count_is_threads_times_reps() {
        let spec = BenchSpec { reps: 5, ..small(Problem::Randmat, StrategyKind::WorkerPool) };
        let recs = run_benchmark(&spec).unwrap();
        assert_eq!(recs.len(), 10);
        assert!(recs.iter().all(|r| r.seconds > 0.0 && r.paradigm == "worker-pool" && r.variant == "par"));
        assert_eq!(recs.iter().filter(|r| r.threads == 2).map(|r| r.rep).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn warmups_and_reps_call_the_kernel() {
        let mut calls = 0;
        let spec = small(Problem::Thresh, StrategyKind::Skeleton);
        let recs = run_benchmark_with(&spec, |_, _| {
            calls += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(calls, 8);
    }

    #[test]
    fn timed_region_excludes_input_synthesis() {
        let spec = BenchSpec {
            size: KernelParams::square(1500, 1, 50),
            thread_counts: vec![1],
            reps: 10,
            ..small(Problem::Product, StrategyKind::BlockedParFor)
        };
        let recs = run_benchmark_with(&spec, |_, _| Ok(())).unwrap();
        let mean = recs.iter().map(|r| r.seconds).sum::<f64>() / recs.len() as f64;
        assert!(mean < 1e-3, "{mean}");
    }

    #[test]
    fn kernel_errors_carry_context() {
        let spec = BenchSpec { warmups: 0, ..small(Problem::Outer, StrategyKind::ForkJoin) };
        let mut n = 0;
        let err = run_benchmark_with(&spec, |_, _| {
            n += 1;
            if n == 2 {
                Err(KernelError::InvalidParameter("boom"))
            } else {
                Ok(())
            }
        })
        .unwrap_err();
        assert_eq!(err.to_string(), "outer on 1 threads, rep 1: invalid parameter: boom");
    }

    #[test]
    fn invalid_specs() {
        let base = small(Problem::Randmat, StrategyKind::Skeleton);
        assert!(BenchSpec { reps: 0, ..base.clone() }.validate().is_err());
        assert!(BenchSpec { thread_counts: vec![], ..base.clone() }.validate().is_err());
        assert!(BenchSpec { thread_counts: vec![2, 0], ..base.clone() }.validate().is_err());
        assert!(BenchSpec { grain: Some(0), ..base }.validate().is_err());
    }

    #[test]
    fn starved_winnow_fails_before_timing() {
        let mut spec = small(Problem::Winnow, StrategyKind::WorkerPool);
        spec.size.percent = 0;
        let mut calls = 0;
        let err = run_benchmark_with(&spec, |_, _| {
            calls += 1;
            Ok(())
        });
        assert!(matches!(err, Err(BenchError::Input { .. })));
        assert_eq!(calls, 0);
    }

    #[test]
    fn missing_input_file() {
        let dir = tempfile::tempdir().unwrap();
        let spec = BenchSpec {
            is_bench: false,
            input_dir: dir.path().into(),
            ..small(Problem::Chain, StrategyKind::Skeleton)
        };
        assert!(matches!(run_benchmark(&spec), Err(BenchError::InputMissing(_))));
        std::fs::write(dir.path().join("chain.in"), "20 3 50\n").unwrap();
        assert_eq!(run_benchmark(&spec).unwrap().len(), 6);
    }
}
