//! Cumulative differences and the cumulative calibration errors
//! ECCE-MAD and ECCE-R, with their null normalization.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// The running sums C_0 = 0, C_1, ..., C_n of (response - score) / n.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCurve {
    values: Vec<f64>,
}

impl CumulativeCurve {
    /// The n + 1 cumulative values, starting at 0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The matching abscissas k/n for k = 0..n.
    pub fn abscissas(&self) -> impl Iterator<Item = f64> + '_ {
        let n = (self.values.len() - 1) as f64;
        (0..self.values.len()).map(move |k| k as f64 / n)
    }
}

/// Kahan-compensated running sum; the increments are ~1/n and n can be
/// large enough that naive accumulation loses digits.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Computes the cumulative-difference curve of a dataset.
pub fn cumulative_curve(ds: &Dataset) -> CumulativeCurve {
    let n = ds.n() as f64;
    let mut values = Vec::with_capacity(ds.n() + 1);
    values.push(0.0);
    let mut acc = CompensatedSum::default();
    for s in ds.samples() {
        acc.add((s.response as f64 - s.score) / n);
        values.push(acc.value());
    }
    CumulativeCurve { values }
}

/// Null standard deviation of C_n: sqrt((1/n²) Σ S_j (1 - S_j)).
///
/// Errors when every score is exactly 0 or 1, since the normalized
/// statistics are undefined there.
pub fn sigma_n(ds: &Dataset) -> Result<f64> {
    let n = ds.n() as f64;
    let mut acc = CompensatedSum::default();
    for s in ds.samples() {
        acc.add(s.score * (1.0 - s.score));
    }
    let total = acc.value();
    if total <= 0.0 {
        return Err(Error::DegenerateSigma);
    }
    Ok((total / (n * n)).sqrt())
}

/// Tail probabilities for the normalized statistics. The Brownian
/// limit implementation lives in the `pvalues` module; tests may plug
/// in alternatives.
pub trait TailProvider {
    /// P(max |B(t)| > x) over the unit interval.
    fn tail_maxabs(&self, x: f64) -> f64;
    /// P(max B - min B > x) over the unit interval.
    fn tail_range(&self, x: f64) -> f64;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcceReport {
    pub ecce_mad: f64,
    pub ecce_r: f64,
    pub sigma_n: f64,
    pub mad_normalized: f64,
    pub r_normalized: f64,
    pub p_mad: f64,
    pub p_r: f64,
}

/// Computes the cumulative calibration errors, their normalized
/// values, and the associated asymptotic P-values.
pub fn ecce(ds: &Dataset, tails: &dyn TailProvider) -> Result<EcceReport> {
    let sigma = sigma_n(ds)?;
    let curve = cumulative_curve(ds);
    let mut max = 0.0f64;
    let mut min = 0.0f64;
    let mut mad = 0.0f64;
    for (k, &c) in curve.values().iter().enumerate() {
        max = max.max(c);
        min = min.min(c);
        if k >= 1 {
            mad = mad.max(c.abs());
        }
    }
    let ecce_mad = mad;
    let ecce_r = max - min;
    let mad_normalized = ecce_mad / sigma;
    let r_normalized = ecce_r / sigma;
    Ok(EcceReport {
        ecce_mad,
        ecce_r,
        sigma_n: sigma,
        mad_normalized,
        r_normalized,
        p_mad: tails.tail_maxabs(mad_normalized),
        p_r: tails.tail_range(r_normalized),
    })
}

/// Brute-force maximum of |Σ_{j in I} (R_j - S_j)| / n over all
/// contiguous index intervals I. Equals ECCE-R; O(n²), used as an
/// independent oracle.
pub fn max_interval_miscalibration(ds: &Dataset) -> f64 {
    let n = ds.n() as f64;
    let diffs: Vec<f64> = ds
        .samples()
        .iter()
        .map(|s| (s.response as f64 - s.score) / n)
        .collect();
    let mut best = 0.0f64;
    for i in 0..diffs.len() {
        let mut sum = 0.0;
        for d in &diffs[i..] {
            sum += d;
            best = best.max(sum.abs());
        }
    }
    best
}
