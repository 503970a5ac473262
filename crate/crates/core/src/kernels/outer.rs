use super::{try_zeroed, KernelError, PointList, RealMatrix, RealVector};
use crate::exec::{par_chunks_mut, Executor};

fn distance(a: (usize, usize), b: (usize, usize)) -> f64 {
    let dr = a.0 as f64 - b.0 as f64;
    let dc = a.1 as f64 - b.1 as f64;
    libm::sqrt(dr * dr + dc * dc)
}

/// Pairwise distance matrix of `pts` plus each point's distance to the
/// origin. The diagonal holds `n` times the row's largest off-diagonal
/// entry (0 for a single point).
pub fn outer<E>(pts: &PointList, ex: &E) -> Result<(RealMatrix, RealVector), KernelError>
where
    E: Executor + ?Sized,
{
    let n = pts.len();
    if n == 0 {
        return Err(KernelError::InvalidParameter("outer needs at least one point"));
    }
    let cells = n.checked_mul(n).ok_or(KernelError::Capacity { nrows: n, ncols: n })?;
    let mut matrix = try_zeroed::<f64>(cells, (n, n))?;
    let p = &pts.points;
    par_chunks_mut(ex, &mut matrix, n, |i, row| {
        let mut max = 0.0f64;
        for (j, dst) in row.iter_mut().enumerate() {
            if j != i {
                let d = distance(p[i], p[j]);
                max = max.max(d);
                *dst = d;
            }
        }
        row[i] = n as f64 * max;
    });
    let mut vector = try_zeroed::<f64>(n, (n, 1))?;
    par_chunks_mut(ex, &mut vector, ex.grain_for(n), |c, chunk| {
        let base = c * ex.grain_for(n);
        for (k, dst) in chunk.iter_mut().enumerate() {
            *dst = distance(p[base + k], (0, 0));
        }
    });
    Ok((RealMatrix::from_raw(n, matrix), RealVector::new(vector)))
}
