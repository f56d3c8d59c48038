//! Generative label model for entity matching.
//!
//! Each LF's vote is a three-outcome categorical variable conditioned on the
//! latent class (match / non-match), with votes independent given the class.
//! Separate accuracies on matches (`P(+1 | match)`) and non-matches
//! (`P(−1 | non-match)`) handle the heavy class imbalance of candidate sets.
//! Parameters are fitted by EM, and after every E-step the posterior is
//! closed under the transitivity inequality `γ_ij · γ_ik ≤ γ_jk`.

mod diagnostics;
mod em;
mod fit;
mod params;
mod transitivity;

pub use diagnostics::{
    estimate_em_precision, fn_drilldown, fp_drilldown, lf_quality, precision_sample, LfQuality, PrecisionEstimate,
    MATCH_THRESHOLD,
};
pub use em::{e_step, log_likelihood, m_step, majority_gamma, majority_vote, Clamps};
pub use fit::{fit, FitConfig, PosteriorLabels};
pub use params::{Class, LfParameters, VoteDistribution, EPS};
pub use transitivity::{
    constrained_edges, max_violation, transitivity_project, transitivity_project_ordered, PairGraph,
    ProjectionReport, SweepOrder,
};
