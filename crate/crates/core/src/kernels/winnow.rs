use alloc::vec::Vec;

use super::{try_zeroed, IntMatrix, KernelError, Mask, PointList, VALUE_LIMIT};
use crate::exec::{par_chunks_mut, par_scan, Executor};

const BINS: usize = VALUE_LIMIT as usize;

/// Selects `nelts` evenly spaced points from the masked cells ordered by
/// `(value, row, col)`: output `k` is the candidate at rank
/// `floor(k * n_c / nelts)`.
///
/// Candidates are never materialised. Per-row value counts laid out in
/// `(value, row)` order are prefix-summed, which locates the bucket holding
/// any rank directly; within a bucket, row-major order already matches the
/// `(value, row, col)` tie-break.
pub fn winnow<E>(m: &IntMatrix, mask: &Mask, nelts: usize, ex: &E) -> Result<PointList, KernelError>
where
    E: Executor + ?Sized,
{
    let (nrows, ncols) = (m.nrows(), m.ncols());
    if (mask.nrows(), mask.ncols()) != (nrows, ncols) {
        return Err(KernelError::Shape { expected: (nrows, ncols), found: (mask.nrows(), mask.ncols()) });
    }

    // counts[r * BINS + v]: masked cells of value v in row r.
    let mut counts = try_zeroed::<usize>(nrows * BINS, (nrows, BINS))?;
    par_chunks_mut(ex, &mut counts, BINS, |r, hist| {
        for (&v, &keep) in m.row(r).iter().zip(mask.row(r)) {
            if keep {
                hist[v as usize] += 1;
            }
        }
    });
    let by_value: Vec<usize> = (0..BINS * nrows).map(|b| counts[(b % nrows) * BINS + b / nrows]).collect();
    let ends = par_scan(ex, &by_value, 0usize, |a, b| a + b);
    let available = ends.last().copied().unwrap_or(0);
    if available < nelts {
        return Err(KernelError::InsufficientCandidates { available, requested: nelts });
    }

    let mut points = try_zeroed::<(usize, usize)>(nelts, (nelts, 1))?;
    par_chunks_mut(ex, &mut points, 1, |k, out| {
        let rank = (k as u128 * available as u128 / nelts as u128) as usize;
        let bucket = ends.partition_point(|&end| end <= rank);
        let (value, row) = ((bucket / nrows) as u32, bucket % nrows);
        let mut skip = rank - (ends[bucket] - by_value[bucket]);
        let col = m
            .row(row)
            .iter()
            .zip(mask.row(row))
            .position(|(&v, &keep)| {
                if keep && v == value {
                    if skip == 0 {
                        return true;
                    }
                    skip -= 1;
                }
                false
            })
            .expect("bucket count matches row contents");
        out[0] = (row, col);
    });
    Ok(PointList::new(points))
}
