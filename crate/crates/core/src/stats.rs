//! Exact binomial confidence intervals.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Proportion `k/n` with an interval at the requested level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateCI {
    pub k: u64,
    pub n: u64,
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
}

impl EstimateCI {
    pub fn contains(&self, p: f64) -> bool {
        self.lo <= p && p <= self.hi
    }

    /// True when the two intervals share at least one point.
    pub fn overlaps(&self, other: &EstimateCI) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Point estimate with an interval but no single underlying count, as
/// produced by combining several binomial estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl From<EstimateCI> for Interval {
    fn from(e: EstimateCI) -> Self {
        Interval { point: e.point, lo: e.lo, hi: e.hi }
    }
}

/// Quantile of Beta(a, b) by bisection on the regularized incomplete beta.
fn beta_quantile(q: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn check_counts(k: u64, n: u64, level: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("confidence interval over zero trials".into()));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("{k} successes out of {n} trials")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level}")));
    }
    Ok(())
}

/// Two-sided Clopper-Pearson interval.
pub fn estimate_ci(k: u64, n: u64, level: f64) -> Result<EstimateCI> {
    check_counts(k, n, level)?;
    let alpha = 1.0 - level;
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 { 0.0 } else { beta_quantile(alpha / 2.0, kf, nf - kf + 1.0) };
    let hi = if k == n { 1.0 } else { beta_quantile(1.0 - alpha / 2.0, kf + 1.0, nf - kf) };
    let point = kf / nf;
    Ok(EstimateCI { k, n, point, lo: lo.min(point), hi: hi.max(point) })
}

/// One-sided Clopper-Pearson interval `[0, hi]`.
pub fn upper_bound_ci(k: u64, n: u64, level: f64) -> Result<EstimateCI> {
    check_counts(k, n, level)?;
    let (kf, nf) = (k as f64, n as f64);
    let hi = if k == n { 1.0 } else { beta_quantile(level, kf + 1.0, nf - kf) };
    let point = kf / nf;
    Ok(EstimateCI { k, n, point, lo: 0.0, hi: hi.max(point) })
}

/// Two-sided interval, except that `k = 0` gets the one-sided upper bound.
pub fn reported_ci(k: u64, n: u64, level: f64) -> Result<EstimateCI> {
    if k == 0 {
        upper_bound_ci(k, n, level)
    } else {
        estimate_ci(k, n, level)
    }
}
