use super::{try_zeroed, IntMatrix, KernelError, VALUE_LIMIT};
use crate::exec::{par_chunks_mut, Executor};

pub const LCG_MULTIPLIER: u32 = 1_664_525;
pub const LCG_INCREMENT: u32 = 1_013_904_223;
/// Offset between the starting states of consecutive rows.
pub const ROW_STRIDE: u32 = 2_654_435_769;

/// One step of `x -> (1664525 x + 1013904223) mod 2^32`.
#[inline]
pub fn lcg_next(x: u32) -> u32 {
    x.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT)
}

/// Starting state of row `r`'s generator.
#[inline]
pub fn row_seed(seed: u32, row: usize) -> u32 {
    // Only the low 32 bits of the row index matter modulo 2^32.
    seed.wrapping_add((row as u32).wrapping_mul(ROW_STRIDE))
}

/// Random matrix whose element `(r, c)` is the `(c+1)`-th output of row `r`'s
/// generator, reduced mod 100. Each row has its own stream, so rows can be
/// filled in any order.
pub fn randmat<E>(nrows: usize, ncols: usize, seed: u32, ex: &E) -> Result<IntMatrix, KernelError>
where
    E: Executor + ?Sized,
{
    if nrows == 0 || ncols == 0 {
        return Err(KernelError::InvalidParameter("nrows and ncols must be at least 1"));
    }
    let cells = nrows.checked_mul(ncols).ok_or(KernelError::Capacity { nrows, ncols })?;
    let mut data = try_zeroed::<u32>(cells, (nrows, ncols))?;
    par_chunks_mut(ex, &mut data, ncols, |r, row| {
        let mut x = row_seed(seed, r);
        for v in row.iter_mut() {
            x = lcg_next(x);
            *v = x % VALUE_LIMIT;
        }
    });
    Ok(IntMatrix::from_raw(nrows, ncols, data))
}
