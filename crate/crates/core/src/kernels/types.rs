use alloc::vec::Vec;

use super::KernelError;

/// Exclusive upper bound of [`IntMatrix`] elements.
pub const VALUE_LIMIT: u32 = 100;

/// Dense row-major matrix of values in `[0, 100)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<u32>,
}

impl IntMatrix {
    pub fn new(nrows: usize, ncols: usize, data: Vec<u32>) -> Result<Self, KernelError> {
        check_len(nrows, ncols, data.len())?;
        if data.iter().any(|&v| v >= VALUE_LIMIT) {
            return Err(KernelError::InvalidParameter("matrix element out of [0, 100)"));
        }
        Ok(IntMatrix { nrows, ncols, data })
    }

    pub(crate) fn from_raw(nrows: usize, ncols: usize, data: Vec<u32>) -> Self {
        debug_assert_eq!(data.len(), nrows * ncols);
        IntMatrix { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.ncols + c]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mask {
    nrows: usize,
    ncols: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn new(nrows: usize, ncols: usize, data: Vec<bool>) -> Result<Self, KernelError> {
        check_len(nrows, ncols, data.len())?;
        Ok(Mask { nrows, ncols, data })
    }

    pub(crate) fn from_raw(nrows: usize, ncols: usize, data: Vec<bool>) -> Self {
        debug_assert_eq!(data.len(), nrows * ncols);
        Mask { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[bool] {
        &self.data[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.ncols + c]
    }

    /// Number of set cells.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

/// Ordered `(row, col)` coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PointList {
    pub points: Vec<(usize, usize)>,
}

impl PointList {
    pub fn new(points: Vec<(usize, usize)>) -> Self {
        PointList { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Square row-major matrix of reals.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, KernelError> {
        check_len(n, n, data.len())?;
        Ok(RealMatrix { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = alloc::vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        RealMatrix { n, data }
    }

    pub(crate) fn from_raw(n: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), n * n);
        RealMatrix { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RealVector {
    pub data: Vec<f64>,
}

impl RealVector {
    pub fn new(data: Vec<f64>) -> Self {
        RealVector { data }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Problem-size parameters shared by all kernels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KernelParams {
    pub nrows: usize,
    pub ncols: usize,
    pub seed: u32,
    pub percent: u32,
    pub nelts: usize,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams { nrows: 2000, ncols: 2000, seed: 42, percent: 50, nelts: 2000 }
    }
}

impl KernelParams {
    /// Square problem of side `n` with `nelts = n`.
    pub fn square(n: usize, seed: u32, percent: u32) -> Self {
        KernelParams { nrows: n, ncols: n, seed, percent, nelts: n }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if self.nrows == 0 || self.ncols == 0 {
            return Err(KernelError::InvalidParameter("nrows and ncols must be at least 1"));
        }
        if self.nelts == 0 {
            return Err(KernelError::InvalidParameter("nelts must be at least 1"));
        }
        check_percent(self.percent)
    }
}

pub(crate) fn check_percent(percent: u32) -> Result<(), KernelError> {
    if percent > 100 {
        Err(KernelError::InvalidParameter("percent must lie in [0, 100]"))
    } else {
        Ok(())
    }
}

fn check_len(nrows: usize, ncols: usize, len: usize) -> Result<(), KernelError> {
    let cells = nrows.checked_mul(ncols).ok_or(KernelError::Capacity { nrows, ncols })?;
    if cells != len {
        return Err(KernelError::Shape { expected: (nrows, ncols), found: (len, 1) });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constructors_check_invariants() {
        assert!(IntMatrix::new(2, 2, vec![0, 1, 2, 99]).is_ok());
        assert!(IntMatrix::new(2, 2, vec![0, 1, 2, 100]).is_err());
        assert!(IntMatrix::new(2, 3, vec![0; 4]).is_err());
        assert!(Mask::new(1, 2, vec![true]).is_err());
        assert!(RealMatrix::new(2, vec![0.0; 3]).is_err());
        assert!(matches!(IntMatrix::new(usize::MAX, 2, vec![]), Err(KernelError::Capacity { .. })));
    }

    #[test]
    fn params_validation() {
        assert!(KernelParams::default().validate().is_ok());
        assert!(KernelParams { percent: 101, ..Default::default() }.validate().is_err());
        assert!(KernelParams { nelts: 0, ..Default::default() }.validate().is_err());
        assert!(KernelParams { nrows: 0, ..Default::default() }.validate().is_err());
    }
}
