use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::{LabelMatrix, Vote};

/// γ at or above this counts as a predicted match.
pub const MATCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfQuality {
    pub lf_id: String,
    /// Posterior-weighted share of the LF's +1 votes on non-matches.
    pub est_fpr: f64,
    /// Posterior-weighted share of the LF's −1 votes on matches.
    pub est_fnr: f64,
}

pub fn lf_quality(matrix: &LabelMatrix, gamma: &[f64]) -> Vec<LfQuality> {
    matrix
        .lf_ids()
        .iter()
        .zip(matrix.columns())
        .map(|(id, column)| {
            let (mut fp, mut n_pos, mut fn_, mut n_neg) = (0.0, 0usize, 0.0, 0usize);
            for (&v, &g) in column.iter().zip(gamma) {
                match v {
                    Vote::Match => {
                        fp += 1.0 - g;
                        n_pos += 1;
                    }
                    Vote::Unmatch => {
                        fn_ += g;
                        n_neg += 1;
                    }
                    Vote::Abstain => {}
                }
            }
            LfQuality {
                lf_id: id.clone(),
                est_fpr: if n_pos == 0 { 0.0 } else { fp / n_pos as f64 },
                est_fnr: if n_neg == 0 { 0.0 } else { fn_ / n_neg as f64 },
            }
        })
        .collect()
}

/// Pairs the LF votes +1 on while the model says non-match, most confident
/// disagreement (lowest γ) first.
pub fn fp_drilldown(matrix: &LabelMatrix, lf: usize, gamma: &[f64]) -> Vec<usize> {
    let mut hits: Vec<usize> = (0..matrix.n_pairs())
        .filter(|&i| matrix.vote(i, lf) == Vote::Match && gamma[i] < MATCH_THRESHOLD)
        .collect();
    hits.sort_by(|&a, &b| gamma[a].total_cmp(&gamma[b]).then(a.cmp(&b)));
    hits
}

/// Pairs the LF votes −1 on while the model says match, highest γ first.
pub fn fn_drilldown(matrix: &LabelMatrix, lf: usize, gamma: &[f64]) -> Vec<usize> {
    let mut hits: Vec<usize> = (0..matrix.n_pairs())
        .filter(|&i| matrix.vote(i, lf) == Vote::Unmatch && gamma[i] >= MATCH_THRESHOLD)
        .collect();
    hits.sort_by(|&a, &b| gamma[b].total_cmp(&gamma[a]).then(a.cmp(&b)));
    hits
}

/// Seeded uniform sample (without replacement) of up to `n` predicted
/// matches, as pair indices.
pub fn precision_sample(gamma: &[f64], n: usize, seed: u64) -> Result<Vec<usize>> {
    let predicted: Vec<usize> = (0..gamma.len()).filter(|&i| gamma[i] >= MATCH_THRESHOLD).collect();
    if predicted.is_empty() {
        return Err(Error::NoPredictedMatches);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let take = n.min(predicted.len());
    Ok(sample(&mut rng, predicted.len(), take)
        .into_iter()
        .map(|k| predicted[k])
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionEstimate {
    pub precision: f64,
    pub n_labeled: usize,
}

/// Fraction of labeled sample pairs that the user marked as matches. `labels`
/// holds `Some(is_match)` for labeled pairs. `None` when nothing is labeled.
pub fn estimate_em_precision(labels: &[Option<bool>]) -> Option<PrecisionEstimate> {
    let labeled: Vec<bool> = labels.iter().flatten().copied().collect();
    if labeled.is_empty() {
        return None;
    }
    let matches = labeled.iter().filter(|&&m| m).count();
    Some(PrecisionEstimate {
        precision: matches as f64 / labeled.len() as f64,
        n_labeled: labeled.len(),
    })
}
