use super::{outer, product, randmat, thresh, winnow, KernelError, RealVector};
use crate::exec::Executor;

/// randmat -> thresh -> winnow -> outer -> product on an `nelts x nelts`
/// matrix, selecting `nelts` points.
pub fn chain<E>(nelts: usize, seed: u32, percent: u32, ex: &E) -> Result<RealVector, KernelError>
where
    E: Executor + ?Sized,
{
    let matrix = randmat(nelts, nelts, seed, ex)?;
    let mask = thresh(&matrix, percent, ex)?;
    let points = winnow(&matrix, &mask, nelts, ex)?;
    let (distances, origin) = outer(&points, ex)?;
    product(&distances, &origin, ex)
}
