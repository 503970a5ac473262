//! The six benchmark problems.
//!
//! Every kernel is a pure function of its inputs. Parallelism is delegated to
//! the [`Executor`] passed in, and all kernels are written so that the result
//! is bit-identical for every executor and thread count: work is split across
//! rows (or output elements), never inside a floating-point sum.

mod chain;
mod outer;
mod product;
mod randmat;
mod thresh;
mod types;
mod winnow;

pub use chain::chain;
pub use outer::outer;
pub use product::product;
pub use randmat::{lcg_next, randmat, row_seed, LCG_INCREMENT, LCG_MULTIPLIER, ROW_STRIDE};
pub use thresh::{thresh, threshold_value};
pub use types::{IntMatrix, KernelParams, Mask, PointList, RealMatrix, RealVector, VALUE_LIMIT};
pub use winnow::winnow;

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::exec::Executor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelError {
    /// `nrows * ncols` does not fit in memory.
    Capacity { nrows: usize, ncols: usize },
    /// The mask selected fewer cells than requested points.
    InsufficientCandidates { available: usize, requested: usize },
    /// Operand dimensions disagree.
    Shape { expected: (usize, usize), found: (usize, usize) },
    /// A parameter violates its documented range.
    InvalidParameter(&'static str),
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::Capacity { nrows, ncols } => {
                write!(f, "matrix of {nrows}x{ncols} elements exceeds addressable size")
            }
            KernelError::InsufficientCandidates { available, requested } => {
                write!(f, "winnow needs {requested} candidate points but the mask selects only {available}")
            }
            KernelError::Shape { expected, found } => {
                write!(f, "shape mismatch: expected {}x{}, found {}x{}", expected.0, expected.1, found.0, found.1)
            }
            KernelError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for KernelError {}

/// The benchmark problems, in pipeline order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Problem {
    Randmat,
    Thresh,
    Winnow,
    Outer,
    Product,
    Chain,
}

impl Problem {
    pub const ALL: [Problem; 6] =
        [Problem::Randmat, Problem::Thresh, Problem::Winnow, Problem::Outer, Problem::Product, Problem::Chain];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Randmat => "randmat",
            Problem::Thresh => "thresh",
            Problem::Winnow => "winnow",
            Problem::Outer => "outer",
            Problem::Product => "product",
            Problem::Chain => "chain",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownProblem;

impl fmt::Display for UnknownProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown problem (expected randmat, thresh, winnow, outer, product or chain)")
    }
}

impl core::error::Error for UnknownProblem {}

impl FromStr for Problem {
    type Err = UnknownProblem;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Problem::ALL.into_iter().find(|p| p.name() == s).ok_or(UnknownProblem)
    }
}

/// Everything one kernel invocation consumes.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelInput {
    Randmat { nrows: usize, ncols: usize, seed: u32 },
    Thresh { matrix: IntMatrix, percent: u32 },
    Winnow { matrix: IntMatrix, mask: Mask, nelts: usize },
    Outer { points: PointList },
    Product { matrix: RealMatrix, vector: RealVector },
    Chain { nelts: usize, seed: u32, percent: u32 },
}

impl KernelInput {
    pub fn problem(&self) -> Problem {
        match self {
            KernelInput::Randmat { .. } => Problem::Randmat,
            KernelInput::Thresh { .. } => Problem::Thresh,
            KernelInput::Winnow { .. } => Problem::Winnow,
            KernelInput::Outer { .. } => Problem::Outer,
            KernelInput::Product { .. } => Problem::Product,
            KernelInput::Chain { .. } => Problem::Chain,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelOutput {
    Matrix(IntMatrix),
    Mask(Mask),
    Points(PointList),
    Outer(RealMatrix, RealVector),
    Vector(RealVector),
}

/// Dispatches `input` to its kernel.
pub fn run_kernel<E>(input: &KernelInput, ex: &E) -> Result<KernelOutput, KernelError>
where
    E: Executor + ?Sized,
{
    Ok(match input {
        KernelInput::Randmat { nrows, ncols, seed } => KernelOutput::Matrix(randmat(*nrows, *ncols, *seed, ex)?),
        KernelInput::Thresh { matrix, percent } => KernelOutput::Mask(thresh(matrix, *percent, ex)?),
        KernelInput::Winnow { matrix, mask, nelts } => KernelOutput::Points(winnow(matrix, mask, *nelts, ex)?),
        KernelInput::Outer { points } => {
            let (m, v) = outer(points, ex)?;
            KernelOutput::Outer(m, v)
        }
        KernelInput::Product { matrix, vector } => KernelOutput::Vector(product(matrix, vector, ex)?),
        KernelInput::Chain { nelts, seed, percent } => KernelOutput::Vector(chain(*nelts, *seed, *percent, ex)?),
    })
}

/// Synthesizes the in-memory input for `problem` from `params`.
///
/// Inputs of later stages are the outputs of the earlier ones at the same
/// seed, exactly as `chain` would produce them, so nothing is read from disk.
/// Uses the sequential kernels.
pub fn generate_input(problem: Problem, params: &KernelParams) -> Result<KernelInput, KernelError> {
    use crate::exec::Sequential;
    params.validate()?;
    let ex = Sequential;
    let randmat_out = || randmat(params.nrows, params.ncols, params.seed, &ex);
    Ok(match problem {
        Problem::Randmat => KernelInput::Randmat { nrows: params.nrows, ncols: params.ncols, seed: params.seed },
        Problem::Thresh => KernelInput::Thresh { matrix: randmat_out()?, percent: params.percent },
        Problem::Winnow => {
            let matrix = randmat_out()?;
            let mask = thresh(&matrix, params.percent, &ex)?;
            let available = mask.count();
            if available < params.nelts {
                return Err(KernelError::InsufficientCandidates { available, requested: params.nelts });
            }
            KernelInput::Winnow { matrix, mask, nelts: params.nelts }
        }
        Problem::Outer => KernelInput::Outer { points: pipeline_points(params, &ex)? },
        Problem::Product => {
            let (matrix, vector) = outer(&pipeline_points(params, &ex)?, &ex)?;
            KernelInput::Product { matrix, vector }
        }
        Problem::Chain => KernelInput::Chain { nelts: params.nelts, seed: params.seed, percent: params.percent },
    })
}

fn pipeline_points<E: Executor + ?Sized>(params: &KernelParams, ex: &E) -> Result<PointList, KernelError> {
    let matrix = randmat(params.nrows, params.ncols, params.seed, ex)?;
    let mask = thresh(&matrix, params.percent, ex)?;
    winnow(&matrix, &mask, params.nelts, ex)
}

/// Allocates a zeroed buffer of `n` elements, reporting failure instead of
/// aborting.
pub(crate) fn try_zeroed<T: Clone + Default>(n: usize, dims: (usize, usize)) -> Result<Vec<T>, KernelError> {
    let mut v = Vec::new();
    v.try_reserve_exact(n).map_err(|_| KernelError::Capacity { nrows: dims.0, ncols: dims.1 })?;
    v.resize(n, T::default());
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::testing::Shuffled;
    use crate::exec::Sequential;

    #[test]
    fn problem_names_round_trip() {
        for p in Problem::ALL {
            assert_eq!(p.name().parse::<Problem>(), Ok(p));
        }
        assert!("mandel".parse::<Problem>().is_err());
    }

    #[test]
    fn generated_inputs_follow_the_pipeline() {
        let params = KernelParams { nrows: 100, ncols: 100, seed: 5, percent: 50, nelts: 100 };
        let ex = Sequential;
        let m = randmat(100, 100, 5, &ex).unwrap();
        match generate_input(Problem::Thresh, &params).unwrap() {
            KernelInput::Thresh { matrix, percent } => {
                assert_eq!(matrix, m);
                assert_eq!(percent, 50);
            }
            other => panic!("unexpected {other:?}"),
        }
        let mask = thresh(&m, 50, &ex).unwrap();
        let pts = winnow(&m, &mask, 100, &ex).unwrap();
        let (om, ov) = outer(&pts, &ex).unwrap();
        match generate_input(Problem::Product, &params).unwrap() {
            KernelInput::Product { matrix, vector } => {
                assert_eq!(matrix, om);
                assert_eq!(vector, ov);
                // product of the generated inputs is the chain result.
                let via_chain = chain(100, 5, 50, &ex).unwrap();
                assert_eq!(product(&matrix, &vector, &ex).unwrap(), via_chain);
            }
            other => panic!("unexpected {other:?}"),
        }
        // Same bytes on every call.
        assert_eq!(generate_input(Problem::Outer, &params).unwrap(), generate_input(Problem::Outer, &params).unwrap());
    }

    #[test]
    fn generate_input_rejects_starved_winnow() {
        let params = KernelParams { nrows: 10, ncols: 10, seed: 1, percent: 0, nelts: 3 };
        assert_eq!(
            generate_input(Problem::Winnow, &params),
            Err(KernelError::InsufficientCandidates { available: 0, requested: 3 })
        );
    }

    #[test]
    fn run_kernel_is_executor_independent() {
        let params = KernelParams { nrows: 40, ncols: 33, seed: 77, percent: 30, nelts: 40 };
        for problem in Problem::ALL {
            let input = generate_input(problem, &params).unwrap();
            let want = run_kernel(&input, &Sequential).unwrap();
            for seed in 0..4 {
                let got = run_kernel(&input, &Shuffled::new(seed, 3)).unwrap();
                assert_eq!(got, want, "{problem}");
            }
        }
    }
}
