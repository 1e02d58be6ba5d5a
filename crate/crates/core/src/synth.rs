//! Synthetic datasets: score grids, ground-truth calibration
//! functions, Bernoulli response draws, and the analytic large-n
//! limits of the calibration statistics.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::dataset::{Dataset, Sample};
use crate::error::{Error, Result};

/// Placement rule for the synthetic scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    Equispaced,
    Squared,
    SquareRooted,
}

impl GridKind {
    pub fn label(&self) -> &'static str {
        match self {
            GridKind::Equispaced => "equispaced",
            GridKind::Squared => "squared",
            GridKind::SquareRooted => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreGrid {
    pub kind: GridKind,
    pub n: usize,
}

/// Ground-truth probability of success as a function of the score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CalibrationFunction {
    /// r(s) = s.
    Perfect,
    /// r(s) = s + amplitude * sin(2 pi frequency s).
    SinePerturbed { amplitude: f64, frequency: u32 },
}

impl CalibrationFunction {
    /// Builds the sine perturbation, checking on a fine grid that the
    /// perturbed function still maps [0, 1] into [0, 1].
    pub fn sine(amplitude: f64, frequency: u32) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "amplitude must be a nonnegative real, got {amplitude}"
            )));
        }
        if frequency == 0 {
            return Err(Error::InvalidArgument(
                "frequency must be a positive integer".into(),
            ));
        }
        let cal = CalibrationFunction::SinePerturbed {
            amplitude,
            frequency,
        };
        for i in 0..=10_000 {
            let s = i as f64 / 10_000.0;
            let r = cal.eval(s);
            if !(0.0..=1.0).contains(&r) {
                return Err(Error::InvalidArgument(format!(
                    "sine perturbation leaves [0, 1]: r({s}) = {r}"
                )));
            }
        }
        Ok(cal)
    }

    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            CalibrationFunction::Perfect => s,
            CalibrationFunction::SinePerturbed {
                amplitude,
                frequency,
            } => s + amplitude * (2.0 * PI * frequency as f64 * s).sin(),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            CalibrationFunction::Perfect => "perfect".into(),
            CalibrationFunction::SinePerturbed {
                amplitude,
                frequency,
            } => format!("sine(amp={amplitude},freq={frequency})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub grid: ScoreGrid,
    pub calibration: CalibrationFunction,
    pub seed: u64,
}

/// Generates the score sequence for a grid: the base grid is k/n for
/// k = 1..n, optionally squared or square-rooted elementwise.
pub fn make_scores(grid: &ScoreGrid) -> Vec<f64> {
    let n = grid.n;
    (1..=n)
        .map(|k| {
            let s = k as f64 / n as f64;
            match grid.kind {
                GridKind::Equispaced => s,
                GridKind::Squared => s * s,
                GridKind::SquareRooted => s.sqrt(),
            }
        })
        .collect()
}

/// splitmix64; used to derive per-index uniforms and per-realization
/// seeds so draws are independent of evaluation order.
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn uniform_from(seed: u64, index: u64) -> f64 {
    let h = mix64(mix64(seed).wrapping_add(mix64(index.wrapping_add(0x6a09e667f3bcc909))));
    // 53 random bits into [0, 1).
    (h >> 11) as f64 / (1u64 << 53) as f64
}

/// Draws one Bernoulli response per score with success probability
/// r(score). Draw k depends only on (seed, k).
pub fn draw_responses(scores: &[f64], cal: &CalibrationFunction, seed: u64) -> Result<Dataset> {
    let mut samples = Vec::with_capacity(scores.len());
    for (i, &s) in scores.iter().enumerate() {
        let r = cal.eval(s);
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidArgument(format!(
                "calibration function leaves [0, 1]: r({s}) = {r}"
            )));
        }
        let u = uniform_from(seed, i as u64);
        samples.push(Sample {
            score: s,
            response: u8::from(u < r),
        });
    }
    Dataset::from_sorted(samples)
}

/// Generates a full synthetic dataset from a config.
pub fn generate(config: &SynthConfig) -> Result<Dataset> {
    draw_responses(&make_scores(&config.grid), &config.calibration, config.seed)
}

/// Large-n limits of the statistics under an imperfect calibration
/// with a bounded number of draws per bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlternativeLimits {
    pub ece2_limit: f64,
    pub ecce_mad_limit: f64,
    pub ecce_r_limit: f64,
    pub draws_per_bin: usize,
}

/// Analytic limits for an equispaced grid:
///
/// - ece2 tends to the integral of (r(s) - s)^2 plus the noise floor,
///   the integral of r(s)(1 - r(s)) divided by the draws per bin;
/// - ecce-mad tends to the maximum over t of |G(t)| where
///   G(t) is the integral of r(s) - s from 0 to t;
/// - ecce-r tends to max G - min G.
///
/// Integrals are evaluated by adaptive quadrature to 1e-10; the
/// extrema of G are located at its critical points, where r(t) = t.
pub fn alternative_limits(
    cal: &CalibrationFunction,
    grid_kind: GridKind,
    draws_per_bin: usize,
) -> Result<AlternativeLimits> {
    if grid_kind != GridKind::Equispaced {
        return Err(Error::InvalidArgument(
            "analytic limits are only available for the equispaced grid".into(),
        ));
    }
    if draws_per_bin == 0 {
        return Err(Error::InvalidArgument(
            "draws per bin must be positive".into(),
        ));
    }
    let nu = draws_per_bin as f64;
    let sq_dev = adaptive_simpson(&|s| (cal.eval(s) - s).powi(2), 0.0, 1.0, 1e-10);
    let noise = adaptive_simpson(&|s| cal.eval(s) * (1.0 - cal.eval(s)), 0.0, 1.0, 1e-10);
    let ece2_limit = sq_dev + noise / nu;

    // Candidate extrema of G: endpoints plus points where r(t) = t.
    let mut candidates = vec![0.0, 1.0];
    if let CalibrationFunction::SinePerturbed { frequency, .. } = *cal {
        for j in 0..=(2 * frequency) {
            candidates.push(j as f64 / (2.0 * frequency as f64));
        }
    }
    let mut g_max = 0.0f64;
    let mut g_min = 0.0f64;
    for &t in &candidates {
        let g = adaptive_simpson(&|s| cal.eval(s) - s, 0.0, t, 1e-10);
        g_max = g_max.max(g);
        g_min = g_min.min(g);
    }
    Ok(AlternativeLimits {
        ece2_limit,
        ecce_mad_limit: g_max.abs().max(g_min.abs()),
        ecce_r_limit: g_max - g_min,
        draws_per_bin,
    })
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Start from 13 panels: a single panel over [0, 1] samples the
    // sine perturbations exactly at their zeros and the error estimate
    // vanishes spuriously.
    const PANELS: usize = 13;
    let mut total = 0.0;
    for i in 0..PANELS {
        let lo = a + (b - a) * i as f64 / PANELS as f64;
        let hi = a + (b - a) * (i + 1) as f64 / PANELS as f64;
        let flo = f(lo);
        let fhi = f(hi);
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_step(f, lo, hi, flo, fmid, fhi, whole, tol / PANELS as f64, 30);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_grids() {
        let eq = make_scores(&ScoreGrid {
            kind: GridKind::Equispaced,
            n: 4,
        });
        assert_eq!(eq, vec![0.25, 0.5, 0.75, 1.0]);

        let sq = make_scores(&ScoreGrid {
            kind: GridKind::Squared,
            n: 4,
        });
        assert_eq!(sq, vec![0.0625, 0.25, 0.5625, 1.0]);

        let rt = make_scores(&ScoreGrid {
            kind: GridKind::SquareRooted,
            n: 4,
        });
        for (got, expected) in rt.iter().zip([0.5, 0.70711, 0.86603, 1.0]) {
            assert!((got - expected).abs() < 1e-5);
        }
    }

    #[test]
    fn grids_strictly_increasing() {
        for kind in [GridKind::Equispaced, GridKind::Squared, GridKind::SquareRooted] {
            let scores = make_scores(&ScoreGrid { kind, n: 1000 });
            assert!(scores.windows(2).all(|w| w[0] < w[1]));
            assert!(scores.iter().all(|&s| s > 0.0 && s <= 1.0));
        }
    }

    #[test]
    fn sine_perturbation_stays_in_unit_interval() {
        let cal = CalibrationFunction::sine(0.1, 2).unwrap();
        assert_eq!(cal.eval(0.0), 0.0);
        assert!((cal.eval(1.0) - 1.0).abs() < 1e-12);
        // A large amplitude escapes [0, 1] near the ends.
        assert!(CalibrationFunction::sine(0.5, 2).is_err());
    }

    #[test]
    fn responses_follow_bernoulli_mean() {
        let scores = vec![0.3; 1];
        let mut hits = 0usize;
        let trials = 100_000;
        for seed in 0..trials {
            let ds = draw_responses(&scores, &CalibrationFunction::Perfect, seed).unwrap();
            hits += ds.samples()[0].response as usize;
        }
        let mean = hits as f64 / trials as f64;
        assert!((mean - 0.3).abs() < 0.005, "mean = {mean}");
    }

    #[test]
    fn response_at_score_one_is_always_one() {
        for seed in 0..100 {
            let ds = draw_responses(&[1.0], &CalibrationFunction::Perfect, seed).unwrap();
            assert_eq!(ds.samples()[0].response, 1);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SynthConfig {
            grid: ScoreGrid {
                kind: GridKind::SquareRooted,
                n: 512,
            },
            calibration: CalibrationFunction::sine(0.1, 2).unwrap(),
            seed: 17,
        };
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
    }

    #[test]
    fn limits_for_sine_perturbation() {
        let cal = CalibrationFunction::sine(0.1, 2).unwrap();
        let lim = alternative_limits(&cal, GridKind::Equispaced, 16).unwrap();
        let expected_mad = 0.2 / (4.0 * PI);
        assert!((lim.ecce_mad_limit - expected_mad).abs() < 1e-8);
        assert!((lim.ecce_r_limit - expected_mad).abs() < 1e-8);
        let expected_ece2 = 0.005 + (1.0 / 6.0 + 0.1 / (2.0 * PI) - 0.005) / 16.0;
        assert!((lim.ece2_limit - expected_ece2).abs() < 1e-8);
    }

    #[test]
    fn limits_for_perfect_calibration() {
        let lim =
            alternative_limits(&CalibrationFunction::Perfect, GridKind::Equispaced, 16).unwrap();
        assert!((lim.ece2_limit - 1.0 / 96.0).abs() < 1e-10);
        assert_eq!(lim.ecce_mad_limit, 0.0);
        assert_eq!(lim.ecce_r_limit, 0.0);
    }

    #[test]
    fn limits_reject_unsupported_combinations() {
        assert!(alternative_limits(&CalibrationFunction::Perfect, GridKind::Squared, 16).is_err());
        assert!(
            alternative_limits(&CalibrationFunction::Perfect, GridKind::Equispaced, 0).is_err()
        );
    }
}
