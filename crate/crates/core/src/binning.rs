//! Binning strategies and the binned calibration errors ECE¹ and ECE².

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// How scores are grouped into bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinningStrategy {
    /// Bins cover equal sub-intervals of [0, 1]; empty bins are omitted
    /// and every emitted bin carries Riemann weight 1/m.
    Equispaced,
    /// Bins hold (almost) equal numbers of consecutive sorted samples;
    /// the Riemann weight is the gap between successive bins' smallest
    /// scores, with 1 standing in past the last bin.
    EqualCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinningSpec {
    pub strategy: BinningStrategy,
    pub m: usize,
}

/// Per-bin averages and the Riemann weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinSummary {
    /// Smallest score in the bin.
    pub left_score: f64,
    /// Riemann weight: 1/m for equispaced bins, the score gap otherwise.
    pub weight: f64,
    /// Average score in the bin.
    pub avg_score: f64,
    /// Average response in the bin.
    pub avg_response: f64,
    /// Number of samples in the bin.
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EceReport {
    pub ece1: f64,
    pub ece2: f64,
    pub spec: BinningSpec,
    pub bins: Vec<BinSummary>,
}

/// Groups a dataset's samples into bins and summarizes each bin.
pub fn assign_bins(ds: &Dataset, spec: &BinningSpec) -> Result<Vec<BinSummary>> {
    let n = ds.n();
    if spec.m == 0 {
        return Err(Error::ZeroBins);
    }
    if spec.m > n {
        return Err(Error::TooManyBins { m: spec.m, n });
    }
    let m = spec.m;
    let samples = ds.samples();

    match spec.strategy {
        BinningStrategy::Equispaced => {
            let mut bins = Vec::new();
            let mut start = 0;
            while start < n {
                // Bin index for a score s is floor(s * m), with s = 1
                // folded into the last bin.
                let idx = bin_index(samples[start].score, m);
                let mut end = start + 1;
                while end < n && bin_index(samples[end].score, m) == idx {
                    end += 1;
                }
                bins.push(summarize(&samples[start..end], 1.0 / m as f64));
                start = end;
            }
            Ok(bins)
        }
        BinningStrategy::EqualCount => {
            let base = n / m;
            let mut edges = Vec::with_capacity(m + 1);
            for j in 0..m {
                edges.push(j * base);
            }
            edges.push(n);
            let mut bins = Vec::with_capacity(m);
            for j in 0..m {
                let slice = &samples[edges[j]..edges[j + 1]];
                let next_left = if j + 1 < m {
                    samples[edges[j + 1]].score
                } else {
                    1.0
                };
                bins.push(summarize(slice, next_left - slice[0].score));
            }
            Ok(bins)
        }
    }
}

fn bin_index(score: f64, m: usize) -> usize {
    ((score * m as f64).floor() as usize).min(m - 1)
}

fn summarize(slice: &[crate::dataset::Sample], weight: f64) -> BinSummary {
    let count = slice.len();
    let avg_score = slice.iter().map(|s| s.score).sum::<f64>() / count as f64;
    let avg_response = slice.iter().map(|s| s.response as f64).sum::<f64>() / count as f64;
    BinSummary {
        left_score: slice[0].score,
        weight,
        avg_score,
        avg_response,
        count,
    }
}

/// Computes the binned calibration errors over a dataset.
///
/// `ece2` is the weighted sum of squared bin differences, `ece1` the
/// weighted sum of absolute differences.
pub fn ece(ds: &Dataset, spec: &BinningSpec) -> Result<EceReport> {
    let bins = assign_bins(ds, spec)?;
    let mut ece1 = 0.0;
    let mut ece2 = 0.0;
    for b in &bins {
        let d = b.avg_response - b.avg_score;
        ece1 += b.weight * d.abs();
        ece2 += b.weight * d * d;
    }
    Ok(EceReport {
        ece1,
        ece2,
        spec: *spec,
        bins,
    })
}
