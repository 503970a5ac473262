use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::special::normal_cdf;
use super::StatsError;

/// Largest number of non-zero differences handled by exact enumeration.
pub const EXACT_LIMIT: usize = 12;
/// p below this is "significantly" different.
pub const SIGNIFICANT: f64 = 0.05;
/// p below this (and not significant) "tends to be" different.
pub const TENDS: f64 = 0.1;

#[derive(Clone, Debug, PartialEq)]
pub struct SignedRankTest {
    /// Number of non-zero differences.
    pub n: usize,
    /// Rank sum of positive differences `y - x`.
    pub w_plus: f64,
    /// Rank sum of negative differences.
    pub w_minus: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub exact: bool,
}

/// Two-sided Wilcoxon signed-rank test on the differences `y - x`.
///
/// Zero differences are dropped and tied magnitudes share their average rank.
/// Up to [`EXACT_LIMIT`] remaining differences the null distribution is
/// counted exactly over all sign assignments; beyond that a normal
/// approximation with tie correction is used.
pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<SignedRankTest, StatsError> {
    if pairs.is_empty() {
        return Err(StatsError::InsufficientData { needed: 1, found: 0 });
    }
    if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut diffs: Vec<f64> = pairs.iter().map(|(x, y)| y - x).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(SignedRankTest { n: 0, w_plus: 0.0, w_minus: 0.0, p_value: 1.0, exact: true });
    }
    diffs.sort_by(|a, b| a.abs().total_cmp(&b.abs()));

    // Twice the average rank, so ties stay integral.
    let mut ranks2 = vec![0u64; n];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && diffs[j].abs() == diffs[i].abs() {
            j += 1;
        }
        let doubled = (i + 1 + j) as u64;
        ranks2[i..j].fill(doubled);
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let w2_plus: u64 = diffs.iter().zip(&ranks2).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total2: u64 = ranks2.iter().sum();
    let w_plus = w2_plus as f64 / 2.0;
    let w_minus = (total2 - w2_plus) as f64 / 2.0;

    let (p_value, exact) = if n <= EXACT_LIMIT {
        (exact_p(&ranks2, w2_plus), true)
    } else {
        let nf = n as f64;
        let expected = nf * (nf + 1.0) / 4.0;
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = (w_plus - expected) / libm::sqrt(var);
        ((2.0 * normal_cdf(-z.abs())).min(1.0), false)
    };
    Ok(SignedRankTest { n, w_plus, w_minus, p_value, exact })
}

/// `min(1, 2 * min(P[W <= w], P[W >= w]))` under random signs, as the exact
/// rational `k / 2^n`.
fn exact_p(ranks2: &[u64], w2: u64) -> f64 {
    let total: u64 = ranks2.iter().sum();
    // counts[s]: sign assignments whose positive doubled-rank sum is s.
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            counts[s + r] += counts[s];
        }
        reach += r;
    }
    let lower: u64 = counts[..=w2 as usize].iter().sum();
    let upper: u64 = counts[w2 as usize..].iter().sum();
    let patterns = 1u64 << ranks2.len();
    let k = (2 * lower.min(upper)).min(patterns);
    k as f64 / patterns as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strength {
    Significant,
    Tends,
    None,
}

impl Strength {
    pub fn from_p(p: f64) -> Strength {
        if p < SIGNIFICANT {
            Strength::Significant
        } else if p < TENDS {
            Strength::Tends
        } else {
            Strength::None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strength::Significant => "significant",
            Strength::Tends => "tends",
            Strength::None => "none",
        }
    }
}

/// Outcome of comparing two paradigms over the same problems, where smaller
/// metric values are better.
#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseResult {
    pub a: String,
    pub b: String,
    pub p_value: f64,
    pub better: Option<String>,
    pub strength: Strength,
    pub test: SignedRankTest,
}

/// Compares `a` and `b` on paired values `(a_i, b_i)`.
///
/// `b - a` differences with the larger positive rank sum mean `b` carries the
/// larger values, so `a` is better, and vice versa.
pub fn pairwise(a: &str, b: &str, pairs: &[(f64, f64)]) -> Result<PairwiseResult, StatsError> {
    let test = wilcoxon_signed_rank(pairs)?;
    let better = if test.w_plus > test.w_minus {
        Some(String::from(a))
    } else if test.w_minus > test.w_plus {
        Some(String::from(b))
    } else {
        None
    };
    let strength = if better.is_some() { Strength::from_p(test.p_value) } else { Strength::None };
    Ok(PairwiseResult { a: a.into(), b: b.into(), p_value: test.p_value, better, strength, test })
}
