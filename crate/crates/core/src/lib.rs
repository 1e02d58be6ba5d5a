//! Calibration assessment for probabilistic predictions.
//!
//! Given paired (score, response) observations, this crate computes
//! the binned empirical calibration errors ECE¹ and ECE², the
//! cumulative calibration errors ECCE-MAD and ECCE-R with their null
//! normalization and asymptotically exact P-values, synthetic data
//! generators for studying these statistics, and SVG reliability
//! diagrams and cumulative-difference plots.

pub mod binning;
pub mod cli;
pub mod cumulative;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod io;
pub mod plots;
pub mod pvalues;
pub mod synth;

pub use binning::{assign_bins, ece, BinSummary, BinningSpec, BinningStrategy, EceReport};
pub use cumulative::{
    cumulative_curve, ecce, max_interval_miscalibration, sigma_n, CumulativeCurve, EcceReport,
    TailProvider,
};
pub use dataset::{canonicalize, Dataset, Sample};
pub use error::{Error, Result};
pub use experiments::{bootstrap_band, sweep_bins, sweep_n, BootstrapBand, SweepNConfig, SweepResult};
pub use pvalues::{
    expected_null_constants, mc_oracle, tail_maxabs, tail_range, BrownianTails, TailKind,
    TailResult,
};
pub use synth::{
    alternative_limits, draw_responses, generate, make_scores, CalibrationFunction, GridKind,
    ScoreGrid, SynthConfig,
};
