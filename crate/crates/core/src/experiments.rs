//! Experiment drivers: ECE-versus-bin-count sweeps, sample-size sweeps
//! averaged over several realizations, and bootstrap bands for
//! reliability diagrams.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::binning::{assign_bins, ece, BinningSpec, BinningStrategy};
use crate::cumulative::ecce;
use crate::dataset::{canonicalize, Dataset};
use crate::error::{Error, Result};
use crate::pvalues::BrownianTails;
use crate::synth::{draw_responses, make_scores, mix64, CalibrationFunction, GridKind, ScoreGrid};

/// One experiment family's outputs: a shared axis and one value per
/// axis point for each named series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: Vec<usize>,
    pub series: BTreeMap<String, Vec<f64>>,
    pub realizations: usize,
}

impl SweepResult {
    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.series.get(key).map(|v| v.as_slice())
    }
}

/// Bootstrap-resampled reliability-diagram polylines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapBand {
    /// One polyline of (avg_score, avg_response) vertices per resample.
    pub curves: Vec<Vec<(f64, f64)>>,
}

/// Records ece1 and ece2 for every bin count and both strategies.
pub fn sweep_bins(ds: &Dataset, bin_counts: &[usize]) -> Result<SweepResult> {
    if bin_counts.is_empty() {
        return Err(Error::InvalidArgument("no bin counts given".into()));
    }
    let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for &m in bin_counts {
        for strategy in [BinningStrategy::Equispaced, BinningStrategy::EqualCount] {
            let report = ece(ds, &BinningSpec { strategy, m })?;
            let tag = strategy_label(strategy);
            series
                .entry(format!("ece1/{tag}"))
                .or_default()
                .push(report.ece1);
            series
                .entry(format!("ece2/{tag}"))
                .or_default()
                .push(report.ece2);
        }
    }
    Ok(SweepResult {
        axis: bin_counts.to_vec(),
        series,
        realizations: 1,
    })
}

fn strategy_label(s: BinningStrategy) -> &'static str {
    match s {
        BinningStrategy::Equispaced => "equispaced",
        BinningStrategy::EqualCount => "equal-count",
    }
}

fn calibration_tag(cal: &CalibrationFunction) -> &'static str {
    match cal {
        CalibrationFunction::Perfect => "perfect",
        CalibrationFunction::SinePerturbed { .. } => "sine",
    }
}

/// Configuration for the sample-size sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepNConfig {
    pub sizes: Vec<usize>,
    pub realizations: usize,
    pub draws_per_bin: usize,
    pub master_seed: u64,
    pub grids: Vec<GridKind>,
    pub calibrations: Vec<CalibrationFunction>,
}

impl Default for SweepNConfig {
    fn default() -> Self {
        SweepNConfig {
            sizes: vec![8_192, 16_384, 32_768, 65_536, 131_072],
            realizations: 9,
            draws_per_bin: 16,
            master_seed: 0,
            grids: vec![GridKind::Equispaced, GridKind::Squared, GridKind::SquareRooted],
            calibrations: vec![CalibrationFunction::Perfect],
        }
    }
}

/// Seed for realization `i` of a sweep.
pub fn realization_seed(master_seed: u64, i: usize) -> u64 {
    mix64(master_seed.wrapping_add(mix64(i as u64 ^ 0x5bf0_3635)))
}

/// For every sample size, grid kind, and calibration function, averages
/// ece1/ece2 (equal-count bins with a fixed number of draws per bin),
/// ecce-mad, ecce-r, and the sigma-normalized variants over the
/// configured number of realizations.
pub fn sweep_n(config: &SweepNConfig) -> Result<SweepResult> {
    if config.sizes.is_empty() || config.realizations == 0 {
        return Err(Error::InvalidArgument(
            "sweep needs at least one size and one realization".into(),
        ));
    }
    if config.sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "sizes must be strictly ascending".into(),
        ));
    }
    if config.draws_per_bin == 0
        || config.sizes.iter().any(|&n| n % config.draws_per_bin != 0)
    {
        return Err(Error::InvalidArgument(
            "draws per bin must divide every size".into(),
        ));
    }

    let tails = BrownianTails;
    let mut series: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for &n in &config.sizes {
        let m = n / config.draws_per_bin;
        for &grid in &config.grids {
            let scores = make_scores(&ScoreGrid { kind: grid, n });
            for cal in &config.calibrations {
                let mut sums = [0.0f64; 6];
                for i in 0..config.realizations {
                    let seed = realization_seed(config.master_seed, i);
                    let ds = draw_responses(&scores, cal, seed)?;
                    let er = ece(
                        &ds,
                        &BinningSpec {
                            strategy: BinningStrategy::EqualCount,
                            m,
                        },
                    )?;
                    let cr = ecce(&ds, &tails)?;
                    sums[0] += er.ece1;
                    sums[1] += er.ece2;
                    sums[2] += cr.ecce_mad;
                    sums[3] += cr.ecce_r;
                    sums[4] += cr.mad_normalized;
                    sums[5] += cr.r_normalized;
                }
                let r = config.realizations as f64;
                let tag = format!("{}/{}", grid.label(), calibration_tag(cal));
                let metrics = [
                    "ece1", "ece2", "ecce_mad", "ecce_r", "ecce_mad_norm", "ecce_r_norm",
                ];
                for (metric, sum) in metrics.iter().zip(sums) {
                    series
                        .entry(format!("{metric}/{tag}"))
                        .or_default()
                        .push(sum / r);
                }
            }
        }
    }
    Ok(SweepResult {
        axis: config.sizes.clone(),
        series,
        realizations: config.realizations,
    })
}

/// Resamples the dataset with replacement `curves` times and re-bins
/// each resample with the given spec. Duplicated scores created by the
/// resampling are re-jittered during canonicalization.
pub fn bootstrap_band(
    ds: &Dataset,
    spec: &BinningSpec,
    curves: usize,
    seed: u64,
) -> Result<BootstrapBand> {
    if curves == 0 {
        return Err(Error::InvalidArgument(
            "need at least one bootstrap curve".into(),
        ));
    }
    let pairs = ds.pairs();
    let n = pairs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(curves);
    for c in 0..curves {
        let resample: Vec<(f64, u8)> = (0..n).map(|_| pairs[rng.gen_range(0..n)]).collect();
        let resampled = canonicalize(&resample, mix64(seed ^ (c as u64 + 1)))?;
        let bins = assign_bins(&resampled, spec)?;
        out.push(bins.iter().map(|b| (b.avg_score, b.avg_response)).collect());
    }
    Ok(BootstrapBand { curves: out })
}
