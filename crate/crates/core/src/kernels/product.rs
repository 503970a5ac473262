use super::{try_zeroed, KernelError, RealMatrix, RealVector};
use crate::exec::{par_chunks_mut, Executor};

/// `m * v`. Rows are distributed, but each row is summed left to right so the
/// result does not depend on the executor.
pub fn product<E>(m: &RealMatrix, v: &RealVector, ex: &E) -> Result<RealVector, KernelError>
where
    E: Executor + ?Sized,
{
    let n = m.n();
    if v.len() != n {
        return Err(KernelError::Shape { expected: (n, 1), found: (v.len(), 1) });
    }
    let mut out = try_zeroed::<f64>(n, (n, 1))?;
    let grain = ex.grain_for(n);
    par_chunks_mut(ex, &mut out, grain, |c, chunk| {
        for (k, dst) in chunk.iter_mut().enumerate() {
            let row = m.row(c * grain + k);
            *dst = row.iter().zip(&v.data).fold(0.0, |acc, (a, b)| acc + a * b);
        }
    });
    Ok(RealVector::new(out))
}
