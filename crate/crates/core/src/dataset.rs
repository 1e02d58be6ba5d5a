//! Score/response pairs and their canonical sorted form.
//!
//! All downstream statistics assume scores are sorted ascending and
//! strictly distinct. `canonicalize` establishes that form: it sorts,
//! orders ties uniformly at random, and separates tied scores by a
//! relative jitter of about one part in 1e8.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative magnitude of the jitter applied to tied scores.
const JITTER_SCALE: f64 = 1e-8;

/// One observation: a predicted probability and its binary outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub score: f64,
    pub response: u8,
}

/// A validated dataset: samples sorted strictly ascending by score.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
}

impl Dataset {
    /// Builds a dataset from samples already strictly sorted by score.
    pub fn from_sorted(samples: Vec<Sample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for (i, s) in samples.iter().enumerate() {
            validate_pair(i, s.score, s.response as i64)?;
            if i > 0 && samples[i - 1].score >= s.score {
                return Err(Error::InvalidArgument(format!(
                    "scores not strictly increasing at index {i}"
                )));
            }
        }
        Ok(Dataset { samples })
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.score)
    }

    pub fn pairs(&self) -> Vec<(f64, u8)> {
        self.samples.iter().map(|s| (s.score, s.response)).collect()
    }
}

fn validate_pair(row: usize, score: f64, response: i64) -> Result<()> {
    if !score.is_finite() || !(0.0..=1.0).contains(&score) {
        return Err(Error::ScoreOutOfRange { row, score });
    }
    if response != 0 && response != 1 {
        return Err(Error::BadResponse { row, response });
    }
    Ok(())
}

/// Sorts raw pairs ascending by score and resolves ties.
///
/// Tied scores are ordered uniformly at random (driven by `seed`) and
/// separated by a small relative jitter that keeps the group inside
/// [0, 1] and strictly between its distinct neighbors. Pairs with
/// distinct scores are left untouched.
pub fn canonicalize(raw_pairs: &[(f64, u8)], seed: u64) -> Result<Dataset> {
    if raw_pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    for (i, &(score, response)) in raw_pairs.iter().enumerate() {
        validate_pair(i, score, response as i64)?;
    }

    let mut sorted: Vec<Sample> = raw_pairs
        .iter()
        .map(|&(score, response)| Sample { score, response })
        .collect();
    sorted.sort_by(|a, b| a.score.total_cmp(&b.score));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = sorted.len();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && sorted[j].score == sorted[i].score {
            j += 1;
        }
        if j - i > 1 {
            let value = sorted[i].score;
            // Room on each side: half the gap to the nearest distinct
            // neighbor, clipped to [0, 1] and the jitter scale.
            let scale = JITTER_SCALE * value.max(JITTER_SCALE);
            let below = if i == 0 {
                value
            } else {
                (value - sorted[i - 1].score) / 2.0
            };
            let above = if j == n {
                1.0 - value
            } else {
                (sorted[j].score - value) / 2.0
            };
            let lo = value - scale.min(below);
            let hi = value + scale.min(above);

            let group = &mut sorted[i..j];
            group.shuffle(&mut rng);
            let offsets: Vec<f64> = loop {
                let mut draws: Vec<f64> =
                    (0..group.len()).map(|_| rng.gen_range(lo..=hi)).collect();
                draws.sort_by(f64::total_cmp);
                if draws.windows(2).all(|w| w[0] < w[1]) {
                    break draws;
                }
            };
            for (sample, new_score) in group.iter_mut().zip(offsets) {
                sample.score = new_score;
            }
        }
        i = j;
    }
    Dataset::from_sorted(sorted)
}
