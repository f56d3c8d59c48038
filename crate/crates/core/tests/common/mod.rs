//! Shared oracles, generators and fixture helpers for the integration tests.
//! The oracles here are deliberately naive and share no code with the
//! library beyond its plain data types.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;

use matchwork_core::labelmodel::VoteDistribution;
use matchwork_core::{PairKey, Vote};
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/products")
}

/// Ground-truth matches of the bundled fixture.
pub fn fixture_truth() -> HashSet<PairKey> {
    let mut reader = csv::Reader::from_path(fixture_dir().join("matches.csv")).expect("fixture matches");
    reader
        .records()
        .map(|r| {
            let r = r.expect("record");
            PairKey::new(&r[0], &r[1])
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn scores<T: Eq + std::hash::Hash>(predicted: &HashSet<T>, truth: &HashSet<T>) -> Scores {
    let tp = predicted.intersection(truth).count() as f64;
    let precision = if predicted.is_empty() { 0.0 } else { tp / predicted.len() as f64 };
    let recall = if truth.is_empty() { 0.0 } else { tp / truth.len() as f64 };
    let f1 = if tp == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Scores { precision, recall, f1 }
}

/// F1 of boolean predictions against boolean truth, indexed alike.
pub fn f1_of(predicted: &[bool], truth: &[bool]) -> f64 {
    let pred: HashSet<usize> = (0..predicted.len()).filter(|&i| predicted[i]).collect();
    let gold: HashSet<usize> = (0..truth.len()).filter(|&i| truth[i]).collect();
    scores(&pred, &gold).f1
}

fn vote_prob(d: &VoteDistribution, v: Vote) -> f64 {
    match v {
        Vote::Match => d.p_match_vote,
        Vote::Unmatch => d.p_unmatch_vote,
        Vote::Abstain => 1.0 - d.p_match_vote - d.p_unmatch_vote,
    }
}

/// Posterior P(match | votes) by direct multiplication of the joint.
pub fn bayes_posterior(votes: &[Vote], lfs: &[[VoteDistribution; 2]], pi: f64) -> f64 {
    let mut joint_m = pi;
    let mut joint_u = 1.0 - pi;
    for (v, d) in votes.iter().zip(lfs) {
        joint_m *= vote_prob(&d[0], *v);
        joint_u *= vote_prob(&d[1], *v);
    }
    joint_m / (joint_m + joint_u)
}

/// Raw soft-count estimates `[P(+1|M), P(−1|M), P(+1|U), P(−1|U)]` for one
/// LF column, before any clamping.
pub fn soft_counts(column: &[Vote], gamma: &[f64]) -> [f64; 4] {
    let mut out = [0.0; 4];
    let mass_m: f64 = gamma.iter().sum();
    let mass_u = gamma.len() as f64 - mass_m;
    for (v, g) in column.iter().zip(gamma) {
        match v {
            Vote::Match => {
                out[0] += g / mass_m;
                out[2] += (1.0 - g) / mass_u;
            }
            Vote::Unmatch => {
                out[1] += g / mass_m;
                out[3] += (1.0 - g) / mass_u;
            }
            Vote::Abstain => {}
        }
    }
    out
}

/// Every node triple whose three pairs are edges, as edge indices
/// `[ij, ik, jk]`, found by scanning all triples.
pub fn brute_triangles(n_nodes: usize, edges: &[(usize, usize)]) -> Vec<[usize; 3]> {
    let index: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(e, &(u, v))| ((u.min(v), u.max(v)), e)).collect();
    let mut out = Vec::new();
    for i in 0..n_nodes {
        for j in i + 1..n_nodes {
            let Some(&ij) = index.get(&(i, j)) else { continue };
            for k in j + 1..n_nodes {
                if let (Some(&ik), Some(&jk)) = (index.get(&(i, k)), index.get(&(j, k))) {
                    out.push([ij, ik, jk]);
                }
            }
        }
    }
    out
}

/// Largest `γ_a·γ_b − γ_c` over every triangle and rotation, ignoring
/// rotations whose target is frozen.
pub fn brute_violation(gamma: &[f64], triangles: &[[usize; 3]], frozen: &[bool]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for t in triangles {
        for rot in 0..3 {
            let (c, a, b) = (t[rot], t[(rot + 1) % 3], t[(rot + 2) % 3]);
            if !frozen[c] {
                worst = worst.max(gamma[a] * gamma[b] - gamma[c]);
            }
        }
    }
    worst
}

/// Least upward closure computed by synchronous (Jacobi) rounds: every
/// target is raised from the previous round's values until nothing moves.
pub fn jacobi_closure(gamma: &[f64], triangles: &[[usize; 3]], frozen: &[bool]) -> Vec<f64> {
    let mut cur = gamma.to_vec();
    loop {
        let mut next = cur.clone();
        for t in triangles {
            for rot in 0..3 {
                let (c, a, b) = (t[rot], t[(rot + 1) % 3], t[(rot + 2) % 3]);
                if !frozen[c] {
                    next[c] = next[c].max(cur[a] * cur[b]);
                }
            }
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Planted class-conditional vote distributions: accuracies α_M = P(+1|M)
/// and α_U = P(−1|U) uniform in [0.6, 0.95], with the remaining mass split
/// at random between the wrong vote and abstention.
pub fn planted_lfs<R: Rng>(rng: &mut R, n_lfs: usize) -> Vec<[VoteDistribution; 2]> {
    (0..n_lfs)
        .map(|_| {
            let alpha_m = rng.random_range(0.6..0.95);
            let alpha_u = rng.random_range(0.6..0.95);
            let wrong_m = (1.0 - alpha_m) * rng.random_range(0.2..0.8);
            let wrong_u = (1.0 - alpha_u) * rng.random_range(0.2..0.8);
            [
                VoteDistribution { p_match_vote: alpha_m, p_unmatch_vote: wrong_m },
                VoteDistribution { p_match_vote: wrong_u, p_unmatch_vote: alpha_u },
            ]
        })
        .collect()
}

pub fn draw_vote<R: Rng>(rng: &mut R, d: &VoteDistribution) -> Vote {
    let u: f64 = rng.random();
    if u < d.p_match_vote {
        Vote::Match
    } else if u < d.p_match_vote + d.p_unmatch_vote {
        Vote::Unmatch
    } else {
        Vote::Abstain
    }
}

pub fn draw_row<R: Rng>(rng: &mut R, lfs: &[[VoteDistribution; 2]], is_match: bool) -> Vec<Vote> {
    lfs.iter().map(|d| draw_vote(rng, &d[usize::from(!is_match)])).collect()
}

/// Labels and vote rows drawn from the generative model.
pub fn sample_generative<R: Rng>(
    rng: &mut R,
    lfs: &[[VoteDistribution; 2]],
    pi: f64,
    n_pairs: usize,
) -> (Vec<Vec<Vote>>, Vec<bool>) {
    let truth: Vec<bool> = (0..n_pairs).map(|_| rng.random_bool(pi)).collect();
    let rows = truth.iter().map(|&m| draw_row(rng, lfs, m)).collect();
    (rows, truth)
}

/// Records of one table grouped into entities of `min_records..=max_records`
/// records. Every pair inside an entity is a candidate; pairs across the
/// entities of one block are candidates with probability `cross`. A
/// fraction `hard` of the true pairs draw their votes from the non-match
/// distributions, as when two records of one entity look unalike and only
/// their links through other records give them away. Edge truth is "same
/// entity", which is transitive by construction.
pub struct ClusterData {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize)>,
    pub truth: Vec<bool>,
    pub rows: Vec<Vec<Vote>>,
}

pub struct ClusterShape {
    pub n_blocks: usize,
    pub entities_per_block: usize,
    pub min_records: usize,
    pub max_records: usize,
    pub cross: f64,
    pub hard: f64,
}

pub fn cluster_data<R: Rng>(rng: &mut R, lfs: &[[VoteDistribution; 2]], shape: &ClusterShape) -> ClusterData {
    let mut entity_of = Vec::new();
    let mut edges = Vec::new();
    let mut truth = Vec::new();
    let mut next_entity = 0usize;
    for _ in 0..shape.n_blocks {
        let start = entity_of.len();
        for _ in 0..shape.entities_per_block {
            for _ in 0..rng.random_range(shape.min_records..=shape.max_records) {
                entity_of.push(next_entity);
            }
            next_entity += 1;
        }
        for u in start..entity_of.len() {
            for v in u + 1..entity_of.len() {
                let same = entity_of[u] == entity_of[v];
                if same || rng.random_bool(shape.cross) {
                    edges.push((u, v));
                    truth.push(same);
                }
            }
        }
    }
    let rows = truth
        .iter()
        .map(|&m| {
            let looks_like_match = m && !rng.random_bool(shape.hard);
            draw_row(rng, lfs, looks_like_match)
        })
        .collect();
    ClusterData {
        n_nodes: entity_of.len(),
        edges,
        truth,
        rows,
    }
}
