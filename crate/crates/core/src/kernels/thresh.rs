use super::types::check_percent;
use super::{try_zeroed, IntMatrix, KernelError, Mask, VALUE_LIMIT};
use crate::exec::{par_chunks_mut, par_reduce, Executor, IndexRange};

const BINS: usize = VALUE_LIMIT as usize;

/// Threshold for keeping `target` of the largest values given a value
/// histogram: the largest `t` with `#{x >= t} >= target`. `None` when
/// `target == 0`, meaning nothing is kept.
pub fn threshold_value(histogram: &[u64; BINS], target: u64) -> Option<u32> {
    if target == 0 {
        return None;
    }
    let mut at_or_above = 0u64;
    for t in (0..BINS).rev() {
        at_or_above += histogram[t];
        if at_or_above >= target {
            return Some(t as u32);
        }
    }
    Some(0)
}

/// Marks the `percent`% largest elements of `m` (ties at the threshold are
/// all kept).
pub fn thresh<E>(m: &IntMatrix, percent: u32, ex: &E) -> Result<Mask, KernelError>
where
    E: Executor + ?Sized,
{
    check_percent(percent)?;
    let (nrows, ncols) = (m.nrows(), m.ncols());
    let cells = nrows * ncols;
    let histogram = par_reduce(
        ex,
        IndexRange::upto(nrows),
        [0u64; BINS],
        |r| {
            let mut h = [0u64; BINS];
            for &v in m.row(r) {
                h[v as usize] += 1;
            }
            h
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(b.iter()) {
                *x += y;
            }
            a
        },
    );
    let target = (cells as u128 * percent as u128 / 100) as u64;
    let mut data = try_zeroed::<bool>(cells, (nrows, ncols))?;
    if let Some(t) = threshold_value(&histogram, target) {
        if ncols > 0 {
            par_chunks_mut(ex, &mut data, ncols, |r, row| {
                for (dst, &v) in row.iter_mut().zip(m.row(r)) {
                    *dst = v >= t;
                }
            });
        }
    }
    Ok(Mask::from_raw(nrows, ncols, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::testing::Shuffled;
    use crate::exec::Sequential;
    use crate::kernels::randmat;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    /// Sort-descending oracle: threshold is the target-th largest value.
    fn oracle(m: &IntMatrix, percent: u32) -> Vec<bool> {
        let target = m.data().len() * percent as usize / 100;
        if target == 0 {
            return vec![false; m.data().len()];
        }
        let mut sorted = m.data().to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let t = sorted[target - 1];
        m.data().iter().map(|&v| v >= t).collect()
    }

    #[test]
    fn two_by_two_half() {
        let m = IntMatrix::new(2, 2, vec![1, 2, 3, 4]).unwrap();
        let mask = thresh(&m, 50, &Sequential).unwrap();
        assert_eq!(mask.data(), &[false, false, true, true]);
    }

    #[test]
    fn zero_and_full_percent() {
        let m = randmat(9, 11, 3, &Sequential).unwrap();
        assert_eq!(thresh(&m, 0, &Sequential).unwrap().count(), 0);
        assert_eq!(thresh(&m, 100, &Sequential).unwrap().count(), 99);
        assert!(thresh(&m, 101, &Sequential).is_err());
    }

    proptest! {
        #[test]
        fn matches_sort_oracle(nrows in 1usize..30, ncols in 1usize..30, seed in any::<u32>(), percent in 0u32..=100) {
            let m = randmat(nrows, ncols, seed, &Sequential).unwrap();
            let mask = thresh(&m, percent, &Shuffled::new(seed as u64, 4)).unwrap();
            prop_assert_eq!(mask.data(), &oracle(&m, percent)[..]);
        }

        #[test]
        fn retained_count_is_minimal(nrows in 1usize..30, ncols in 1usize..30, seed in any::<u32>(), percent in 1u32..=100) {
            let m = randmat(nrows, ncols, seed, &Sequential).unwrap();
            let mask = thresh(&m, percent, &Sequential).unwrap();
            let target = nrows * ncols * percent as usize / 100;
            let kept = mask.count();
            prop_assert!(target <= kept);
            if kept > 0 {
                let lowest = m.data().iter().zip(mask.data()).filter(|(_, &k)| k).map(|(&v, _)| v).min().unwrap();
                let without = m.data().iter().filter(|&&v| v > lowest).count();
                prop_assert!(without < target);
            }
        }
    }
}
