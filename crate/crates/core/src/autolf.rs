//! Automatic generation of similarity LFs.
//!
//! Every pipeline configuration on a grid is scored against the candidate
//! set. Precision is estimated without labels by assuming the left table is a
//! reference table without duplicates: a right tuple can be correctly matched
//! to at most one left tuple, so any further matches it receives at a
//! threshold are counted as errors.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidates::CandidateSet;
use crate::error::{Error, Result};
use crate::lf::{validate, CorpusCache, LabelFunctionSpec, LfBody, Origin, SimilarityLf};
use crate::table::{TablePair, Tuple};
use crate::text::{distance, weigh, Distance, Operand, PipelineConfig, Preprocess, Tokenizer, WeightedTokenSet, Weighting};

/// The configuration menu enumerated by [`enumerate_configs`], plus the
/// generation knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoLfGrid {
    /// Attribute sets to compare. Empty means each textual schema attribute
    /// on its own (see [`text_attributes`]).
    pub attr_sets: Vec<Vec<String>>,
    pub preprocess: Vec<Vec<Preprocess>>,
    pub tokenizers: Vec<Tokenizer>,
    pub weightings: Vec<Weighting>,
    pub distances: Vec<Distance>,
    /// Candidate thresholds, tried in ascending order.
    pub thresholds: Vec<f64>,
    /// Minimum share of a candidate's +1 pairs not already covered by kept
    /// LFs.
    pub novelty: f64,
}

impl Default for AutoLfGrid {
    /// 2 preprocess sets × 2 tokenizers × 2 weightings × 2 set distances,
    /// plus edit distance once per preprocess set: 18 configurations.
    fn default() -> Self {
        use Preprocess::*;
        Self {
            attr_sets: Vec::new(),
            preprocess: vec![vec![Lowercase], vec![Lowercase, StripPunctuation, CollapseWhitespace, Stem]],
            tokenizers: vec![Tokenizer::Whitespace, Tokenizer::Qgram(3)],
            weightings: vec![Weighting::Uniform, Weighting::TfIdf],
            distances: vec![Distance::WeightedJaccard, Distance::Cosine, Distance::EditDistanceNormalized],
            thresholds: default_thresholds(),
            novelty: 0.1,
        }
    }
}

/// `0.5, 0.55, …, 0.95`.
pub fn default_thresholds() -> Vec<f64> {
    (0..10).map(|i| (50 + 5 * i) as f64 / 100.0).collect()
}

/// Cartesian product of the pipeline dimensions. String distances ignore the
/// tokenizer and weighting, so they appear once per preprocess set (carrying
/// the first tokenizer and weighting of the grid).
pub fn enumerate_configs(grid: &AutoLfGrid) -> Result<Vec<PipelineConfig>> {
    let empty = [
        ("preprocess", grid.preprocess.is_empty()),
        ("tokenizers", grid.tokenizers.is_empty()),
        ("weightings", grid.weightings.is_empty()),
        ("distances", grid.distances.is_empty()),
    ];
    if let Some((name, _)) = empty.iter().find(|(_, e)| *e) {
        return Err(Error::InvalidParameter(format!("auto-LF grid dimension `{name}` is empty")));
    }
    let mut out = Vec::new();
    for pre in &grid.preprocess {
        for &dist in &grid.distances {
            if dist.is_string_distance() {
                out.push(PipelineConfig::new(pre.clone(), grid.tokenizers[0], grid.weightings[0], dist));
                continue;
            }
            for &tok in &grid.tokenizers {
                for &wt in &grid.weightings {
                    out.push(PipelineConfig::new(pre.clone(), tok, wt, dist));
                }
            }
        }
    }
    Ok(out)
}

/// Schema attributes that hold text. An attribute counts as numeric, and is
/// left out, when at least 80% of its nonempty values on both sides parse as
/// numbers once currency signs and digit separators are removed. String
/// similarity on such values mostly measures coincidence.
pub fn text_attributes(tables: &TablePair) -> Vec<String> {
    let numeric = |v: &str| {
        let cleaned: String = v.chars().filter(|c| !matches!(c, '$' | '€' | '£' | ',' | ' ')).collect();
        cleaned.parse::<f64>().is_ok()
    };
    (0..tables.schema().len())
        .filter(|&a| {
            let values = tables
                .left()
                .tuples()
                .iter()
                .chain(tables.right().tuples())
                .map(|t| t.values[a].trim())
                .filter(|v| !v.is_empty());
            let (mut n, mut num) = (0usize, 0usize);
            for v in values {
                n += 1;
                num += usize::from(numeric(v));
            }
            n > 0 && (num as f64) < 0.8 * n as f64
        })
        .map(|a| tables.schema()[a].clone())
        .collect()
}

/// Similarity of every candidate pair under one configuration, in candidate
/// order.
pub fn pair_similarities(
    pipeline: &PipelineConfig,
    attrs: &[String],
    candidates: &CandidateSet,
    tables: &TablePair,
    corpus: &CorpusCache,
) -> Result<Vec<f64>> {
    let stats = pipeline.needs_corpus().then(|| corpus.stats(tables, attrs, pipeline));
    let stats = stats.as_deref();
    let prepare_side = |tuples: &[Tuple]| -> Result<HashMap<String, (String, WeightedTokenSet)>> {
        tuples
            .par_iter()
            .map(|t| {
                let prepared = pipeline.prepare(&tables.concat_tuple(t, attrs));
                let set = if pipeline.distance.is_string_distance() {
                    WeightedTokenSet::default()
                } else {
                    weigh(&prepared.tokens, pipeline.weighting, stats)?
                };
                Ok((t.id.clone(), (prepared.text, set)))
            })
            .collect()
    };
    let left = prepare_side(tables.left().tuples())?;
    let right = prepare_side(tables.right().tuples())?;
    let missing = (String::new(), WeightedTokenSet::default());
    candidates
        .pairs()
        .par_iter()
        .map(|p| {
            let a = left.get(&p.left_id).unwrap_or(&missing);
            let b = right.get(&p.right_id).unwrap_or(&missing);
            let d = if pipeline.distance.is_string_distance() {
                distance(Operand::Text(&a.0), Operand::Text(&b.0), pipeline.distance)?
            } else {
                distance(Operand::Tokens(&a.1), Operand::Tokens(&b.1), pipeline.distance)?
            };
            Ok(1.0 - d)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionEstimate {
    pub est_precision: f64,
    pub est_match_count: usize,
}

/// Reference-table precision estimate over the pairs with `sims[i] >= t`:
/// `Σ_r min(d(r), 1) / Σ_r d(r)` where `d(r)` counts the left tuples matched
/// to right tuple `r`. An empty match set has precision 1.
pub fn estimate_from_similarities(sims: &[f64], t: f64, candidates: &CandidateSet) -> PrecisionEstimate {
    let mut degree: HashMap<&str, usize> = HashMap::new();
    for (p, &s) in candidates.iter().zip(sims) {
        if s >= t {
            *degree.entry(p.right_id.as_str()).or_default() += 1;
        }
    }
    let total: usize = degree.values().sum();
    PrecisionEstimate {
        est_precision: if total == 0 { 1.0 } else { degree.len() as f64 / total as f64 },
        est_match_count: total,
    }
}

pub fn estimate_precision(
    pipeline: &PipelineConfig,
    attrs: &[String],
    t: f64,
    candidates: &CandidateSet,
    tables: &TablePair,
    corpus: &CorpusCache,
) -> Result<PrecisionEstimate> {
    let sims = pair_similarities(pipeline, attrs, candidates, tables, corpus)?;
    Ok(estimate_from_similarities(&sims, t, candidates))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoLfCandidate {
    pub attrs: Vec<String>,
    pub pipeline: PipelineConfig,
    pub threshold: f64,
    pub est_precision: f64,
    pub est_match_count: usize,
}

/// Runs the grid and returns the kept LFs, named `auto_lf_0`, `auto_lf_1`, …
/// in rank order, together with the scored candidates they came from.
pub fn generate(
    grid: &AutoLfGrid,
    target_precision: f64,
    max_lfs: usize,
    candidates: &CandidateSet,
    tables: &TablePair,
    corpus: &CorpusCache,
) -> Result<Vec<(LabelFunctionSpec, AutoLfCandidate)>> {
    if !(target_precision > 0.0 && target_precision <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "target precision {target_precision} is outside (0, 1]"
        )));
    }
    if max_lfs == 0 {
        return Err(Error::InvalidParameter("max_lfs must be at least 1".into()));
    }
    let configs = enumerate_configs(grid)?;
    let attr_sets: Vec<Vec<String>> = if grid.attr_sets.is_empty() {
        text_attributes(tables).into_iter().map(|a| vec![a]).collect()
    } else {
        grid.attr_sets.clone()
    };
    let mut thresholds = grid.thresholds.clone();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();

    let jobs: Vec<(&Vec<String>, &PipelineConfig)> = attr_sets
        .iter()
        .flat_map(|attrs| configs.iter().map(move |c| (attrs, c)))
        .collect();
    let scored: Vec<Option<(AutoLfCandidate, BTreeSet<usize>)>> = jobs
        .par_iter()
        .map(|&(attrs, pipeline)| {
            let sims = pair_similarities(pipeline, attrs, candidates, tables, corpus)?;
            for &t in &thresholds {
                let est = estimate_from_similarities(&sims, t, candidates);
                // an LF that never fires is vacuously precise but useless
                if est.est_match_count > 0 && est.est_precision >= target_precision {
                    let fired = (0..sims.len()).filter(|&i| sims[i] >= t).collect();
                    let cand = AutoLfCandidate {
                        attrs: attrs.clone(),
                        pipeline: pipeline.clone(),
                        threshold: t,
                        est_precision: est.est_precision,
                        est_match_count: est.est_match_count,
                    };
                    return Ok(Some((cand, fired)));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;

    let mut ranked: Vec<(AutoLfCandidate, BTreeSet<usize>)> = scored.into_iter().flatten().collect();
    // stable: equal counts keep enumeration order
    ranked.sort_by_key(|c| std::cmp::Reverse(c.0.est_match_count));

    let mut covered = BTreeSet::new();
    let mut kept = Vec::new();
    for (cand, fired) in ranked {
        if kept.len() == max_lfs {
            break;
        }
        let new = fired.difference(&covered).count();
        if (new as f64) < grid.novelty * fired.len() as f64 || new == 0 {
            continue;
        }
        covered.extend(fired);
        let spec = LabelFunctionSpec {
            name: format!("auto_lf_{}", kept.len()),
            origin: Origin::Auto,
            body: LfBody::Similarity(SimilarityLf {
                attrs: cand.attrs.clone(),
                match_if_sim_ge: Some(cand.threshold),
                unmatch_if_sim_le: None,
                pipeline: cand.pipeline.clone(),
            }),
        };
        debug_assert!(validate(&spec, tables.schema()).is_empty());
        kept.push((spec, cand));
    }
    Ok(kept)
}
