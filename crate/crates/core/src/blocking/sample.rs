use serde::{Deserialize, Serialize};

use crate::candidates::{CandidatePair, CandidateSet};
use crate::error::{Error, Result};
use crate::labelmodel::{PosteriorLabels, MATCH_THRESHOLD};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPair {
    pub pair: CandidatePair,
    /// Blocking-time similarity hint.
    pub likelihood: f64,
}

/// Likely matches the model misses: pairs with γ below the match threshold,
/// highest similarity hint first, ties by `(left_id, right_id)`.
pub fn smart_sample(
    candidates: &CandidateSet,
    posterior: Option<&PosteriorLabels>,
    n: usize,
) -> Result<Vec<SampledPair>> {
    let posterior = posterior.ok_or(Error::NoPosterior)?;
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be at least 1".into()));
    }
    if posterior.gamma.len() != candidates.len() {
        return Err(Error::InvalidParameter(format!(
            "posterior covers {} pairs but there are {} candidates",
            posterior.gamma.len(),
            candidates.len()
        )));
    }
    let mut missed: Vec<&CandidatePair> = candidates
        .iter()
        .zip(&posterior.gamma)
        .filter(|(_, &g)| g < MATCH_THRESHOLD)
        .map(|(p, _)| p)
        .collect();
    missed.sort_by(|a, b| {
        b.similarity_hint
            .total_cmp(&a.similarity_hint)
            .then_with(|| a.left_id.cmp(&b.left_id))
            .then_with(|| a.right_id.cmp(&b.right_id))
    });
    Ok(missed
        .into_iter()
        .take(n)
        .map(|p| SampledPair {
            pair: p.clone(),
            likelihood: p.similarity_hint,
        })
        .collect())
}
