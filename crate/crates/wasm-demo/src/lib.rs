//! Browser bindings for the calibra library.
//!
//! Exposes three operations to the demo page: a reliability diagram
//! with a bootstrap band, a cumulative-difference plot with the ECCE
//! report, and the Brownian tail probabilities behind the P-values.
//! All heavy lifting happens in the `calibra` crate; this layer only
//! translates arguments and errors across the JS boundary.

use wasm_bindgen::prelude::*;

use calibra::binning::{assign_bins, BinningSpec, BinningStrategy};
use calibra::cumulative::{cumulative_curve, ecce, sigma_n};
use calibra::experiments::bootstrap_band;
use calibra::plots::{cumulative_plot, reliability_diagram, PlotKind, PlotSpec};
use calibra::pvalues::{tail_maxabs, tail_range, BrownianTails};
use calibra::synth::{generate, CalibrationFunction, GridKind, ScoreGrid, SynthConfig};
use calibra::Dataset;

fn to_js(e: calibra::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn parse_grid(grid: &str) -> Result<GridKind, JsValue> {
    match grid {
        "equispaced" => Ok(GridKind::Equispaced),
        "squared" => Ok(GridKind::Squared),
        "sqrt" => Ok(GridKind::SquareRooted),
        other => Err(JsValue::from_str(&format!("unknown grid `{other}`"))),
    }
}

fn parse_strategy(strategy: &str) -> Result<BinningStrategy, JsValue> {
    match strategy {
        "equispaced" => Ok(BinningStrategy::Equispaced),
        "equal-count" => Ok(BinningStrategy::EqualCount),
        other => Err(JsValue::from_str(&format!("unknown strategy `{other}`"))),
    }
}

fn synth_dataset(
    n: usize,
    grid: &str,
    amplitude: f64,
    frequency: u32,
    seed: u64,
) -> Result<Dataset, JsValue> {
    let calibration = if amplitude == 0.0 {
        CalibrationFunction::Perfect
    } else {
        CalibrationFunction::sine(amplitude, frequency).map_err(to_js)?
    };
    generate(&SynthConfig {
        grid: ScoreGrid {
            kind: parse_grid(grid)?,
            n,
        },
        calibration,
        seed,
    })
    .map_err(to_js)
}

/// Reliability diagram for a synthetic dataset, as an SVG string.
/// `bootstrap` light-gray resampled curves are drawn underneath when
/// it is nonzero.
#[wasm_bindgen]
pub fn reliability_svg(
    n: usize,
    grid: &str,
    amplitude: f64,
    frequency: u32,
    bins: usize,
    strategy: &str,
    bootstrap: usize,
    seed: u64,
) -> Result<String, JsValue> {
    let ds = synth_dataset(n, grid, amplitude, frequency, seed)?;
    let spec = BinningSpec {
        strategy: parse_strategy(strategy)?,
        m: bins,
    };
    let summaries = assign_bins(&ds, &spec).map_err(to_js)?;
    let band = if bootstrap > 0 {
        Some(bootstrap_band(&ds, &spec, bootstrap, seed).map_err(to_js)?)
    } else {
        None
    };
    let plot_spec = PlotSpec::new(
        PlotKind::Reliability,
        format!("Reliability diagram (n = {n}, m = {bins})"),
    );
    reliability_diagram(&summaries, band.as_ref(), &plot_spec).map_err(to_js)
}

/// Cumulative-difference plot for a synthetic dataset, as an SVG
/// string annotated with the ECCE statistics and P-values.
#[wasm_bindgen]
pub fn cumulative_svg(
    n: usize,
    grid: &str,
    amplitude: f64,
    frequency: u32,
    seed: u64,
) -> Result<String, JsValue> {
    let ds = synth_dataset(n, grid, amplitude, frequency, seed)?;
    let curve = cumulative_curve(&ds);
    let sigma = sigma_n(&ds).map_err(to_js)?;
    let report = ecce(&ds, &BrownianTails).map_err(to_js)?;
    let spec = PlotSpec::new(
        PlotKind::Cumulative,
        format!("Cumulative differences (n = {n})"),
    );
    cumulative_plot(&curve, sigma, Some(&report), &spec).map_err(to_js)
}

/// The ECCE report for a synthetic dataset, as a JSON string.
#[wasm_bindgen]
pub fn ecce_report_json(
    n: usize,
    grid: &str,
    amplitude: f64,
    frequency: u32,
    seed: u64,
) -> Result<String, JsValue> {
    let ds = synth_dataset(n, grid, amplitude, frequency, seed)?;
    let report = ecce(&ds, &BrownianTails).map_err(to_js)?;
    serde_json::to_string_pretty(&report).map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Tail probabilities of the two Brownian functionals at `x`, as the
/// pair [P(max |B| > x), P(range > x)].
#[wasm_bindgen]
pub fn brownian_tails(x: f64) -> Result<Vec<f64>, JsValue> {
    let mad = tail_maxabs(x).map_err(to_js)?;
    let range = tail_range(x).map_err(to_js)?;
    Ok(vec![mad.p, range.p])
}
