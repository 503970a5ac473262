//! Determinism suite: every kernel on every strategy and thread count must
//! reproduce the sequential result bit for bit.

use multibench_core::kernels::{generate_input, run_kernel};
use multibench_core::{
    ExecStrategy, Executor, KernelError, KernelInput, KernelOutput, KernelParams, Problem, Sequential, StrategyKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::executors::{ExecError, ThreadedExecutor};

/// The kernels under test. Implemented by the library kernels and, in tests,
/// by deliberately faulty stand-ins.
pub trait KernelSuite: Sync {
    fn run(&self, input: &KernelInput, ex: &dyn Executor) -> Result<KernelOutput, KernelError>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LibraryKernels;

impl KernelSuite for LibraryKernels {
    fn run(&self, input: &KernelInput, ex: &dyn Executor) -> Result<KernelOutput, KernelError> {
        run_kernel(input, ex)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidateOptions {
    /// Upper bound on rows and columns of each draw.
    pub size: usize,
    pub trials: usize,
    pub seed: u64,
    pub strategies: Vec<StrategyKind>,
    pub thread_counts: Vec<usize>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions {
            size: 200,
            trials: 20,
            seed: 42,
            strategies: StrategyKind::PARALLEL.to_vec(),
            thread_counts: vec![1, 2, 4, 8],
        }
    }
}

/// The first cell where a strategy disagreed with the sequential oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct Mismatch {
    pub problem: Problem,
    pub strategy: StrategyKind,
    pub threads: usize,
    pub params: KernelParams,
    /// E.g. `(3, 17)`, `points[4]` or `vector[0]`.
    pub cell: String,
    pub expected: String,
    pub found: String,
}

impl std::fmt::Display for Mismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let p = &self.params;
        write!(
            f,
            "{} on {} with {} threads (nrows={} ncols={} seed={} percent={} nelts={}): cell {} expected {} found {}",
            self.problem,
            self.strategy,
            self.threads,
            p.nrows,
            p.ncols,
            p.seed,
            p.percent,
            p.nelts,
            self.cell,
            self.expected,
            self.found
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationSummary {
    pub trials: usize,
    /// Kernel executions compared against the oracle.
    pub checks: usize,
    pub mismatch: Option<Mismatch>,
}

impl ValidationSummary {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Draws kernel parameters with `1 <= nrows, ncols <= size` for which every
/// stage of the pipeline has enough winnow candidates.
pub fn draw_params(rng: &mut impl Rng, size: usize) -> KernelParams {
    let size = size.max(1);
    let nrows = rng.random_range(1..=size);
    let ncols = rng.random_range(1..=size);
    let mut p = KernelParams {
        nrows,
        ncols,
        seed: rng.random(),
        percent: rng.random_range(1..=100),
        nelts: rng.random_range(1..=nrows.min(ncols)),
    };
    loop {
        match generate_input(Problem::Winnow, &p) {
            Err(KernelError::InsufficientCandidates { available: 0, .. }) => p.percent = 100,
            Err(KernelError::InsufficientCandidates { available, .. }) => p.nelts = rng.random_range(1..=available),
            _ => return p,
        }
    }
}

/// Runs the suite for `opts.trials` random parameter draws and stops at the
/// first mismatch.
pub fn validate(suite: &dyn KernelSuite, opts: &ValidateOptions) -> Result<ValidationSummary, ExecError> {
    let mut executors = Vec::new();
    for &kind in &opts.strategies {
        for &threads in &opts.thread_counts {
            executors.push(ThreadedExecutor::new(ExecStrategy::new(kind, threads))?);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checks = 0;
    for _ in 0..opts.trials {
        let params = draw_params(&mut rng, opts.size);
        for problem in Problem::ALL {
            let input = generate_input(problem, &params).expect("draw_params guarantees a valid pipeline");
            let want = run_kernel(&input, &Sequential);
            for ex in &executors {
                checks += 1;
                let got = suite.run(&input, ex);
                if let Some((cell, expected, found)) = compare(&want, &got) {
                    let s = ex.strategy();
                    let mismatch =
                        Mismatch { problem, strategy: s.kind, threads: s.threads(), params, cell, expected, found };
                    return Ok(ValidationSummary { trials: opts.trials, checks, mismatch: Some(mismatch) });
                }
            }
        }
    }
    Ok(ValidationSummary { trials: opts.trials, checks, mismatch: None })
}

type Difference = (String, String, String);

fn compare(want: &Result<KernelOutput, KernelError>, got: &Result<KernelOutput, KernelError>) -> Option<Difference> {
    match (want, got) {
        (Ok(w), Ok(g)) => first_difference(w, g),
        (Err(w), Err(g)) if w == g => None,
        (w, g) => Some(("result".into(), describe(w), describe(g))),
    }
}

fn describe(r: &Result<KernelOutput, KernelError>) -> String {
    match r {
        Ok(_) => "success".into(),
        Err(e) => format!("error ({e})"),
    }
}

fn diff_slices<T: PartialEq + std::fmt::Debug>(
    a: &[T],
    b: &[T],
    eq: impl Fn(&T, &T) -> bool,
    cell: impl Fn(usize) -> String,
) -> Option<Difference> {
    if a.len() != b.len() {
        return Some(("length".into(), a.len().to_string(), b.len().to_string()));
    }
    a.iter().zip(b).position(|(x, y)| !eq(x, y)).map(|i| (cell(i), format!("{:?}", a[i]), format!("{:?}", b[i])))
}

fn same_bits(x: &f64, y: &f64) -> bool {
    x.to_bits() == y.to_bits()
}

/// First differing cell between two kernel outputs; reals compare bitwise.
pub fn first_difference(want: &KernelOutput, got: &KernelOutput) -> Option<Difference> {
    use KernelOutput as O;
    let rc = |ncols: usize| move |i: usize| format!("({}, {})", i / ncols, i % ncols);
    match (want, got) {
        (O::Matrix(a), O::Matrix(b)) if a.ncols() == b.ncols() => {
            diff_slices(a.data(), b.data(), |x, y| x == y, rc(a.ncols()))
        }
        (O::Mask(a), O::Mask(b)) if a.ncols() == b.ncols() => {
            diff_slices(a.data(), b.data(), |x, y| x == y, rc(a.ncols()))
        }
        (O::Points(a), O::Points(b)) => diff_slices(&a.points, &b.points, |x, y| x == y, |i| format!("points[{i}]")),
        (O::Outer(am, av), O::Outer(bm, bv)) if am.n() == bm.n() => {
            diff_slices(am.data(), bm.data(), same_bits, rc(am.n()))
                .or_else(|| diff_slices(&av.data, &bv.data, same_bits, |i| format!("vector[{i}]")))
        }
        (O::Vector(a), O::Vector(b)) => diff_slices(&a.data, &b.data, same_bits, |i| format!("vector[{i}]")),
        _ => Some((
            "shape".into(),
            format!("{want:?}").chars().take(60).collect(),
            format!("{got:?}").chars().take(60).collect(),
        )),
    }
}
