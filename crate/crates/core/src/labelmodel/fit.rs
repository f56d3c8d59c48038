use serde::{Deserialize, Serialize};

use super::em::{e_step, log_likelihood, m_step, majority_gamma, Clamps};
use super::params::LfParameters;
use super::transitivity::{transitivity_project, PairGraph};
use crate::error::{Error, Result};
use crate::labels::LabelMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    pub max_iter: usize,
    /// Stop once the log-likelihood improves by less than this.
    pub tol: f64,
    /// Apply the transitivity projection after every E-step.
    pub transitivity: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-6,
            transitivity: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorLabels {
    /// P(match | votes) per candidate pair.
    pub gamma: Vec<f64>,
    /// Class prior P(match).
    pub pi: f64,
    /// Log-likelihood before projection, one entry per iteration.
    pub iteration_log: Vec<f64>,
    pub converged: bool,
}

impl PosteriorLabels {
    pub fn n_matches(&self, threshold: f64) -> usize {
        self.gamma.iter().filter(|&&g| g >= threshold).count()
    }
}

/// Fits the label model by EM from a majority-vote start.
///
/// Each iteration runs the E-step, records the log-likelihood, projects the
/// posterior onto the transitivity-feasible set (when enabled) and runs the
/// M-step. The returned posterior comes from a final E-step and projection
/// under the returned parameters.
pub fn fit(
    matrix: &LabelMatrix,
    graph: &PairGraph,
    clamps: &Clamps,
    config: &FitConfig,
) -> Result<(PosteriorLabels, LfParameters)> {
    if matrix.n_pairs() == 0 {
        return Err(Error::InvalidParameter("label matrix has no pairs".into()));
    }
    if !matrix.has_votes() {
        return Err(Error::NoUsableLfs);
    }
    if graph.n_edges() != matrix.n_pairs() {
        return Err(Error::InvalidParameter(format!(
            "pair graph has {} edges but the matrix has {} pairs",
            graph.n_edges(),
            matrix.n_pairs()
        )));
    }

    let (mut params, mut pi) = m_step(matrix, &majority_gamma(matrix, clamps));
    let mut log = Vec::new();
    let mut converged = false;
    for _ in 0..config.max_iter {
        let ll = log_likelihood(matrix, &params, pi);
        let mut gamma = e_step(matrix, &params, pi, clamps);
        if config.transitivity {
            transitivity_project(&mut gamma, graph, clamps);
        }
        (params, pi) = m_step(matrix, &gamma);
        let improvement = log.last().map(|prev| ll - prev);
        log.push(ll);
        if improvement.is_some_and(|d| d.abs() < config.tol) {
            converged = true;
            break;
        }
    }
    let mut gamma = e_step(matrix, &params, pi, clamps);
    if config.transitivity {
        transitivity_project(&mut gamma, graph, clamps);
    }
    Ok((
        PosteriorLabels {
            gamma,
            pi,
            iteration_log: log,
            converged,
        },
        params,
    ))
}
