use super::special::student_t_quantile;
use super::StatsError;

/// Two-sided interval around a point estimate. Unbounded intervals carry
/// infinite endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfidenceInterval {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub unbounded: bool,
}

impl ConfidenceInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.unbounded || (self.lo <= x && x <= self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }
}

fn check(samples: &[f64], needed: usize) -> Result<(), StatsError> {
    if samples.len() < needed {
        return Err(StatsError::InsufficientData { needed, found: samples.len() });
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

fn check_level(level: f64) -> Result<(), StatsError> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(StatsError::InvalidLevel(level))
    }
}

/// Arithmetic mean; NaN for an empty slice.
pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(samples: &[f64]) -> f64 {
    let m = mean(samples);
    samples.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (samples.len() as f64 - 1.0)
}

/// Student-t interval for the mean at confidence `level`.
pub fn mean_ci(samples: &[f64], level: f64) -> Result<ConfidenceInterval, StatsError> {
    check(samples, 2)?;
    check_level(level)?;
    let n = samples.len() as f64;
    let m = mean(samples);
    let t = student_t_quantile(0.5 * (1.0 + level), n - 1.0);
    let half = t * libm::sqrt(sample_variance(samples) / n);
    Ok(ConfidenceInterval { estimate: m, lo: m - half, hi: m + half, level, unbounded: false })
}

/// Fieller interval for `mean(num) / mean(den)`.
///
/// The samples are independent; their variances are pooled with
/// `n1 + n2 - 2` degrees of freedom. When the denominator mean is not
/// significantly different from zero at `level` (`g >= 1`) the interval is
/// unbounded.
pub fn fieller_ci(num: &[f64], den: &[f64], level: f64) -> Result<ConfidenceInterval, StatsError> {
    check(num, 2)?;
    check(den, 2)?;
    check_level(level)?;
    let (n1, n2) = (num.len() as f64, den.len() as f64);
    let (m1, m2) = (mean(num), mean(den));
    let df = n1 + n2 - 2.0;
    let pooled = ((n1 - 1.0) * sample_variance(num) + (n2 - 1.0) * sample_variance(den)) / df;
    let v11 = pooled / n1;
    let v22 = pooled / n2;
    let t = student_t_quantile(0.5 * (1.0 + level), df);
    let unbounded =
        |estimate| ConfidenceInterval { estimate, lo: f64::NEG_INFINITY, hi: f64::INFINITY, level, unbounded: true };
    if m2 == 0.0 {
        return Ok(unbounded(f64::NAN));
    }
    let ratio = m1 / m2;
    let g = t * t * v22 / (m2 * m2);
    if g >= 1.0 {
        return Ok(unbounded(ratio));
    }
    let center = ratio / (1.0 - g);
    let half = t / (m2.abs() * (1.0 - g)) * libm::sqrt(v11 * (1.0 - g) + ratio * ratio * v22);
    Ok(ConfidenceInterval {
        estimate: ratio,
        // The exact interval always contains the ratio; clamp rounding noise.
        lo: (center - half).min(ratio),
        hi: (center + half).max(ratio),
        level,
        unbounded: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use statrs::distribution::{ContinuousCDF, StudentsT};

    #[test]
    fn constant_samples_zero_width() {
        let ci = mean_ci(&[3.5; 10], 0.999).unwrap();
        assert_eq!((ci.lo, ci.estimate, ci.hi), (3.5, 3.5, 3.5));
    }

    #[test]
    fn half_width_uses_df29_quantile() {
        let samples: Vec<f64> = (0..30).map(|i| 1.0 + (i as f64) * 0.01).collect();
        let ci = mean_ci(&samples, 0.999).unwrap();
        let t = StudentsT::new(0.0, 1.0, 29.0).unwrap().inverse_cdf(0.9995);
        let s = sample_variance(&samples).sqrt();
        let want = t * s / 30f64.sqrt();
        assert!((ci.half_width() - want).abs() < 1e-9 * want);
        assert!(ci.contains(ci.estimate));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(mean_ci(&[1.0], 0.95), Err(StatsError::InsufficientData { needed: 2, found: 1 }));
        assert!(mean_ci(&[1.0, 2.0], 1.0).is_err());
        assert!(mean_ci(&[1.0, f64::NAN], 0.9).is_err());
        assert!(fieller_ci(&[1.0, 2.0], &[1.0], 0.9).is_err());
    }

    #[test]
    fn fieller_zero_variance_is_exact_ratio() {
        let ci = fieller_ci(&[6.7, 6.7, 6.7], &[0.4, 0.4], 0.999).unwrap();
        assert!(!ci.unbounded);
        assert_eq!(ci.estimate, 6.7 / 0.4);
        assert_eq!((ci.lo, ci.hi), (ci.estimate, ci.estimate));
    }

    #[test]
    fn fieller_unbounded_when_denominator_near_zero() {
        let ci = fieller_ci(&[5.0, 5.2, 4.9], &[-1.0, 1.2, 0.1, -0.5], 0.999).unwrap();
        assert!(ci.unbounded);
        assert!(ci.contains(1e12));
    }

    #[test]
    fn fieller_small_monte_carlo_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (num, den) = (Normal::new(8.0, 0.5).unwrap(), Normal::new(2.0, 0.5).unwrap());
        let mut covered = 0;
        for _ in 0..2000 {
            let a: Vec<f64> = (0..10).map(|_| num.sample(&mut rng)).collect();
            let b: Vec<f64> = (0..10).map(|_| den.sample(&mut rng)).collect();
            let ci = fieller_ci(&a, &b, 0.95).unwrap();
            assert!(ci.contains(ci.estimate));
            covered += ci.contains(4.0) as usize;
        }
        let coverage = covered as f64 / 2000.0;
        assert!((0.93..=0.97).contains(&coverage), "coverage {coverage}");
    }
}
