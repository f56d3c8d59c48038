//! Transitivity closure over posterior match probabilities.
//!
//! For tuples `i, j, k` whose three pairs are all candidates, a feasible
//! assignment satisfies `γ_ij · γ_ik ≤ γ_jk` in all three rotations. The
//! closure raises `γ_jk` to `γ_ij · γ_ik` wherever that is violated and
//! repeats until nothing changes. This is the least upward correction that
//! satisfies every inequality, so the result does not depend on the order in
//! which triangles are visited.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::candidates::CandidateSet;
use crate::labels::Truth;

/// Undirected graph whose edges are the candidate pairs (edge `e` carries
/// `γ[e]`) and whose nodes are tuples.
#[derive(Debug, Clone, Default)]
pub struct PairGraph {
    n_nodes: usize,
    edges: Vec<(usize, usize)>,
    triangles: Vec<[usize; 3]>,
}

impl PairGraph {
    /// `edges[e] = (u, v)` with node ids below `n_nodes`. Self loops and
    /// repeated edges are rejected by panicking.
    pub fn new(n_nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut index = HashMap::with_capacity(edges.len());
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n_nodes];
        for (e, &(u, v)) in edges.iter().enumerate() {
            assert!(u != v && u < n_nodes && v < n_nodes, "bad edge ({u}, {v})");
            let key = (u.min(v), u.max(v));
            assert!(index.insert(key, e).is_none(), "repeated edge ({u}, {v})");
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let edge = |a: usize, b: usize| index.get(&(a.min(b), a.max(b))).copied();
        let mut triangles = Vec::new();
        for u in 0..n_nodes {
            for (pos, &v) in adj[u].iter().enumerate() {
                if v <= u {
                    continue;
                }
                for &w in &adj[u][pos + 1..] {
                    if let Some(vw) = edge(v, w) {
                        let uv = edge(u, v).expect("adjacent");
                        let uw = edge(u, w).expect("adjacent");
                        triangles.push([uv, uw, vw]);
                    }
                }
            }
        }
        Self {
            n_nodes,
            edges,
            triangles,
        }
    }

    /// Nodes are left tuples followed by right tuples. A left×right candidate
    /// graph is bipartite and therefore has no triangles.
    pub fn from_candidates(candidates: &CandidateSet) -> Self {
        let mut left = HashMap::new();
        let mut right = HashMap::new();
        for p in candidates {
            let n = left.len();
            left.entry(p.left_id.as_str()).or_insert(n);
        }
        for p in candidates {
            let n = right.len();
            right.entry(p.right_id.as_str()).or_insert(n);
        }
        let offset = left.len();
        let edges = candidates
            .iter()
            .map(|p| (left[p.left_id.as_str()], offset + right[p.right_id.as_str()]))
            .collect();
        Self::new(offset + right.len(), edges)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Every triangle as three edge indices.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Connected component id per node.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.n_nodes).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..self.n_nodes).map(|x| find(&mut parent, x)).collect()
    }
}

/// Order in which triangles are visited during each sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepOrder {
    Sequential,
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProjectionReport {
    pub sweeps: usize,
    pub updates: usize,
}

/// Projects `gamma` onto the transitivity-feasible set by monotone closure.
/// Pairs with a ground-truth clamp keep their value.
pub fn transitivity_project(gamma: &mut [f64], graph: &PairGraph, clamps: &[Option<Truth>]) -> ProjectionReport {
    transitivity_project_ordered(gamma, graph, clamps, SweepOrder::Sequential)
}

pub fn transitivity_project_ordered(
    gamma: &mut [f64],
    graph: &PairGraph,
    clamps: &[Option<Truth>],
    order: SweepOrder,
) -> ProjectionReport {
    assert_eq!(gamma.len(), graph.n_edges(), "one γ per candidate pair");
    let frozen = |e: usize| clamps.get(e).is_some_and(Option::is_some);
    let mut tris: Vec<[usize; 3]> = graph.triangles().to_vec();
    let mut rng = match order {
        SweepOrder::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        SweepOrder::Sequential => None,
    };
    let mut report = ProjectionReport { sweeps: 0, updates: 0 };
    loop {
        if let Some(rng) = rng.as_mut() {
            tris.shuffle(rng);
        }
        report.sweeps += 1;
        let mut changed = false;
        for t in &tris {
            for rot in 0..3 {
                let target = t[rot];
                if frozen(target) {
                    continue;
                }
                let product = gamma[t[(rot + 1) % 3]] * gamma[t[(rot + 2) % 3]];
                if product > gamma[target] {
                    gamma[target] = product;
                    report.updates += 1;
                    changed = true;
                }
            }
        }
        if !changed {
            return report;
        }
    }
}

/// Largest violation `γ_ij·γ_ik − γ_jk` over all triangles and rotations,
/// skipping rotations whose target is clamped.
pub fn max_violation(gamma: &[f64], graph: &PairGraph, clamps: &[Option<Truth>]) -> f64 {
    let mut worst: f64 = 0.0;
    for t in graph.triangles() {
        for rot in 0..3 {
            if clamps.get(t[rot]).is_some_and(Option::is_some) {
                continue;
            }
            worst = worst.max(gamma[t[(rot + 1) % 3]] * gamma[t[(rot + 2) % 3]] - gamma[t[rot]]);
        }
    }
    worst
}

/// Set of edges lying on at least one triangle.
pub fn constrained_edges(graph: &PairGraph) -> HashSet<usize> {
    graph.triangles().iter().flatten().copied().collect()
}
