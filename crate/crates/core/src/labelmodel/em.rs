use rayon::prelude::*;

use super::params::{Class, LfParameters, VoteDistribution, EPS};
use crate::labels::{LabelMatrix, Truth, Vote};

/// Per-pair clamp from observed ground truth: `Some(match?)` fixes γ at 1 or 0.
pub type Clamps = [Option<Truth>];

fn clamp_value(c: Option<Truth>) -> Option<f64> {
    c.map(|t| if t.is_match() { 1.0 } else { 0.0 })
}

fn log_joint(matrix: &LabelMatrix, params: &LfParameters, pi: f64, pair: usize) -> (f64, f64) {
    let mut log_m = pi.ln();
    let mut log_u = (1.0 - pi).ln();
    for lf in 0..matrix.n_lfs() {
        let v = matrix.vote(pair, lf);
        log_m += params.prob(lf, v, Class::Match).ln();
        log_u += params.prob(lf, v, Class::Unmatch).ln();
    }
    (log_m, log_u)
}

/// Posterior match probability per pair under conditionally independent
/// votes, computed in log space. Clamped pairs get exactly 1 or 0.
pub fn e_step(matrix: &LabelMatrix, params: &LfParameters, pi: f64, clamps: &Clamps) -> Vec<f64> {
    assert_eq!(params.n_lfs(), matrix.n_lfs(), "one parameter set per LF");
    (0..matrix.n_pairs())
        .into_par_iter()
        .map(|i| {
            if let Some(fixed) = clamps.get(i).copied().and_then(clamp_value) {
                return fixed;
            }
            let (log_m, log_u) = log_joint(matrix, params, pi, i);
            // logistic(log_m - log_u), stable on both tails
            let z = log_m - log_u;
            if z >= 0.0 {
                1.0 / (1.0 + (-z).exp())
            } else {
                let e = z.exp();
                e / (1.0 + e)
            }
        })
        .collect()
}

/// Marginal log-likelihood of the observed votes.
pub fn log_likelihood(matrix: &LabelMatrix, params: &LfParameters, pi: f64) -> f64 {
    (0..matrix.n_pairs())
        .map(|i| {
            let (a, b) = log_joint(matrix, params, pi, i);
            let hi = a.max(b);
            hi + ((a - hi).exp() + (b - hi).exp()).ln()
        })
        .sum()
}

/// Soft-count maximum-likelihood update of the vote distributions and the
/// class prior, clamped into `[EPS, 1 - EPS]`.
pub fn m_step(matrix: &LabelMatrix, gamma: &[f64]) -> (LfParameters, f64) {
    assert_eq!(gamma.len(), matrix.n_pairs());
    let mass_m: f64 = gamma.iter().sum();
    let mass_u: f64 = gamma.iter().map(|g| 1.0 - g).sum();
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let lfs = matrix
        .columns()
        .par_iter()
        .map(|column| {
            let (mut pos_m, mut neg_m, mut pos_u, mut neg_u) = (0.0, 0.0, 0.0, 0.0);
            for (&v, &g) in column.iter().zip(gamma) {
                match v {
                    Vote::Match => {
                        pos_m += g;
                        pos_u += 1.0 - g;
                    }
                    Vote::Unmatch => {
                        neg_m += g;
                        neg_u += 1.0 - g;
                    }
                    Vote::Abstain => {}
                }
            }
            [
                VoteDistribution::clamped(ratio(pos_m, mass_m), ratio(neg_m, mass_m)),
                VoteDistribution::clamped(ratio(pos_u, mass_u), ratio(neg_u, mass_u)),
            ]
        })
        .collect();
    let pi = if gamma.is_empty() {
        0.5
    } else {
        mass_m / gamma.len() as f64
    };
    (LfParameters { lfs }, pi.clamp(EPS, 1.0 - EPS))
}

/// Majority vote per pair: `Some(true)` when +1 votes outnumber −1 votes,
/// `Some(false)` for the converse, `None` on ties (including no votes).
pub fn majority_vote(matrix: &LabelMatrix) -> Vec<Option<bool>> {
    (0..matrix.n_pairs())
        .map(|i| {
            let score: i32 = (0..matrix.n_lfs()).map(|j| i32::from(matrix.vote(i, j).value())).sum();
            match score.cmp(&0) {
                std::cmp::Ordering::Greater => Some(true),
                std::cmp::Ordering::Less => Some(false),
                std::cmp::Ordering::Equal => None,
            }
        })
        .collect()
}

/// Provisional γ from majority vote: 1 or 0 by majority, 0.5 on a tie
/// between cast votes, 0 where every LF abstains.
pub fn majority_gamma(matrix: &LabelMatrix, clamps: &Clamps) -> Vec<f64> {
    majority_vote(matrix)
        .into_iter()
        .enumerate()
        .map(|(i, mv)| {
            if let Some(fixed) = clamps.get(i).copied().and_then(clamp_value) {
                return fixed;
            }
            match mv {
                Some(true) => 1.0,
                Some(false) => 0.0,
                None if matrix.row(i).iter().any(|&v| v != Vote::Abstain) => 0.5,
                None => 0.0,
            }
        })
        .collect()
}
