use serde::{Deserialize, Serialize};

use crate::labels::Vote;

/// Probability floor; every modeled probability lies in `[EPS, 1 - EPS]`.
pub const EPS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Class {
    Match,
    Unmatch,
}

impl Class {
    pub(crate) fn index(self) -> usize {
        match self {
            Class::Match => 0,
            Class::Unmatch => 1,
        }
    }
}

/// Class-conditional vote distribution of one LF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoteDistribution {
    /// P(vote = +1 | class)
    pub p_match_vote: f64,
    /// P(vote = −1 | class)
    pub p_unmatch_vote: f64,
}

impl VoteDistribution {
    pub fn abstain(&self) -> f64 {
        1.0 - self.p_match_vote - self.p_unmatch_vote
    }

    pub fn prob(&self, vote: Vote) -> f64 {
        match vote {
            Vote::Match => self.p_match_vote,
            Vote::Unmatch => self.p_unmatch_vote,
            Vote::Abstain => self.abstain(),
        }
    }

    /// Clamps both vote probabilities into `[EPS, 1 - EPS]` and, when their
    /// sum leaves less than `EPS` for abstention, removes the excess from each
    /// in proportion to its distance above the floor.
    pub fn clamped(p_match_vote: f64, p_unmatch_vote: f64) -> Self {
        let clamp = |p: f64| if p.is_nan() { EPS } else { p.clamp(EPS, 1.0 - EPS) };
        let mut pos = clamp(p_match_vote);
        let mut neg = clamp(p_unmatch_vote);
        let excess = pos + neg - (1.0 - EPS);
        if excess > 0.0 {
            let room = (pos - EPS) + (neg - EPS);
            pos -= excess * (pos - EPS) / room;
            neg -= excess * (neg - EPS) / room;
        }
        Self {
            p_match_vote: pos,
            p_unmatch_vote: neg,
        }
    }
}

/// Per-LF vote distributions for both classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfParameters {
    /// `[given match, given non-match]` per LF.
    pub lfs: Vec<[VoteDistribution; 2]>,
}

impl LfParameters {
    pub fn n_lfs(&self) -> usize {
        self.lfs.len()
    }

    pub fn dist(&self, lf: usize, class: Class) -> &VoteDistribution {
        &self.lfs[lf][class.index()]
    }

    pub fn prob(&self, lf: usize, vote: Vote, class: Class) -> f64 {
        self.dist(lf, class).prob(vote)
    }

    /// Accuracy on true matches, P(+1 | match).
    pub fn alpha_match(&self, lf: usize) -> f64 {
        self.dist(lf, Class::Match).p_match_vote
    }

    /// Accuracy on true non-matches, P(−1 | non-match).
    pub fn alpha_unmatch(&self, lf: usize) -> f64 {
        self.dist(lf, Class::Unmatch).p_unmatch_vote
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_respects_simplex() {
        let d = VoteDistribution::clamped(1.0, 0.0);
        assert!((d.p_match_vote - (1.0 - 2.0 * EPS)).abs() < 1e-15);
        assert_eq!(d.p_unmatch_vote, EPS);
        assert!((d.abstain() - EPS).abs() < 1e-15);

        let d = VoteDistribution::clamped(0.0, 0.0);
        assert_eq!((d.p_match_vote, d.p_unmatch_vote), (EPS, EPS));

        let d = VoteDistribution::clamped(0.7, 0.3);
        assert!(d.p_match_vote + d.p_unmatch_vote <= 1.0 - EPS + 1e-15);
        assert!(d.p_match_vote > d.p_unmatch_vote);

        // interior values pass through unchanged
        let d = VoteDistribution::clamped(0.4, 0.25);
        assert_eq!((d.p_match_vote, d.p_unmatch_vote), (0.4, 0.25));
    }
}
