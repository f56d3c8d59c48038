use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use regex::Regex;
use serde::Serialize;

use super::spec::{Comparator, LabelFunctionSpec, LfBody, RuleLf};
use super::validate::{compile_pattern, validate};
use crate::candidates::CandidatePair;
use crate::error::{Error, Result};
use crate::labels::Vote;
use crate::table::{Side, TablePair, Tuple};
use crate::text::{CorpusStats, PipelineConfig, Preprocess, Tokenizer};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct CorpusKey {
    attrs: Vec<String>,
    preprocess: Vec<Preprocess>,
    tokenizer: Tokenizer,
}

/// Document-frequency tables over both tables, one per distinct
/// (attributes, preprocessing, tokenizer) combination. Each table is built on
/// first use and never changes afterwards.
#[derive(Debug, Default)]
pub struct CorpusCache {
    stats: Mutex<HashMap<CorpusKey, Arc<CorpusStats>>>,
}

impl CorpusCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stats(&self, tables: &TablePair, attrs: &[String], pipeline: &PipelineConfig) -> Arc<CorpusStats> {
        let key = CorpusKey {
            attrs: attrs.to_vec(),
            preprocess: pipeline.preprocess.clone(),
            tokenizer: pipeline.tokenizer,
        };
        let mut map = self.stats.lock().expect("corpus cache poisoned");
        map.entry(key)
            .or_insert_with(|| {
                let docs: Vec<Vec<String>> = tables
                    .left()
                    .tuples()
                    .iter()
                    .chain(tables.right().tuples())
                    .map(|t| {
                        let text = crate::text::preprocess(&tables.concat_tuple(t, attrs), &pipeline.preprocess);
                        pipeline.tokenizer.tokenize(&text)
                    })
                    .collect();
                Arc::new(CorpusStats::from_documents(docs.iter().map(Vec::as_slice)))
            })
            .clone()
    }
}

#[derive(Debug)]
enum Compiled {
    Similarity {
        attrs: Vec<String>,
        pipeline: PipelineConfig,
        corpus: Option<Arc<CorpusStats>>,
        hi: Option<f64>,
        lo: Option<f64>,
    },
    Rule {
        rule: RuleLf,
        left: Regex,
        right: Regex,
    },
}

/// A validated spec with its regexes compiled and corpus statistics bound.
#[derive(Debug)]
pub struct CompiledLf {
    name: String,
    compiled: Compiled,
}

/// Intermediate values of one evaluation, for dry-run inspection.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LfTrace {
    Similarity {
        left_input: String,
        right_input: String,
        left_preprocessed: String,
        right_preprocessed: String,
        left_tokens: Vec<String>,
        right_tokens: Vec<String>,
        similarity: f64,
        vote: Vote,
    },
    Rule {
        left_input: String,
        right_input: String,
        left_capture: Option<String>,
        right_capture: Option<String>,
        comparison: Option<bool>,
        vote: Vote,
    },
}

impl LfTrace {
    pub fn vote(&self) -> Vote {
        match self {
            LfTrace::Similarity { vote, .. } | LfTrace::Rule { vote, .. } => *vote,
        }
    }
}

impl CompiledLf {
    pub fn new(spec: &LabelFunctionSpec, tables: &TablePair, corpus: &CorpusCache) -> Result<Self> {
        let diags = validate(spec, tables.schema());
        if !diags.is_empty() {
            return Err(Error::InvalidSpec(diags));
        }
        let compiled = match &spec.body {
            LfBody::Similarity(sim) => Compiled::Similarity {
                attrs: sim.attrs.clone(),
                pipeline: sim.pipeline.clone(),
                corpus: sim
                    .pipeline
                    .needs_corpus()
                    .then(|| corpus.stats(tables, &sim.attrs, &sim.pipeline)),
                hi: sim.match_if_sim_ge,
                lo: sim.unmatch_if_sim_le,
            },
            LfBody::Rule(rule) => Compiled::Rule {
                rule: rule.clone(),
                left: compile_pattern(&rule.extract_left.pattern).expect("validated"),
                right: compile_pattern(&rule.extract_right.pattern).expect("validated"),
            },
        };
        Ok(Self {
            name: spec.name.clone(),
            compiled,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn evaluate_tuples(&self, tables: &TablePair, left: &Tuple, right: &Tuple) -> Vote {
        self.trace_tuples(tables, left, right).vote()
    }

    /// Votes on a candidate pair; ids that fail to resolve read as empty
    /// text.
    pub fn evaluate(&self, pair: &CandidatePair, tables: &TablePair) -> Vote {
        self.trace(pair, tables).vote()
    }

    pub fn trace(&self, pair: &CandidatePair, tables: &TablePair) -> LfTrace {
        let empty_left;
        let empty_right;
        let left = match tables.left().get(&pair.left_id) {
            Some(t) => t,
            None => {
                empty_left = Tuple { id: pair.left_id.clone(), values: vec![String::new(); tables.schema().len()] };
                &empty_left
            }
        };
        let right = match tables.right().get(&pair.right_id) {
            Some(t) => t,
            None => {
                empty_right = Tuple { id: pair.right_id.clone(), values: vec![String::new(); tables.schema().len()] };
                &empty_right
            }
        };
        self.trace_tuples(tables, left, right)
    }

    fn trace_tuples(&self, tables: &TablePair, left: &Tuple, right: &Tuple) -> LfTrace {
        match &self.compiled {
            Compiled::Similarity {
                attrs,
                pipeline,
                corpus,
                hi,
                lo,
            } => {
                let left_input = tables.concat_tuple(left, attrs);
                let right_input = tables.concat_tuple(right, attrs);
                let a = pipeline.prepare(&left_input);
                let b = pipeline.prepare(&right_input);
                let d = pipeline
                    .distance_prepared(&a, &b, corpus.as_deref())
                    .expect("operands and corpus fixed at compile time");
                let similarity = 1.0 - d;
                let vote = if hi.is_some_and(|t| similarity >= t) {
                    Vote::Match
                } else if lo.is_some_and(|t| similarity <= t) {
                    Vote::Unmatch
                } else {
                    Vote::Abstain
                };
                LfTrace::Similarity {
                    left_input,
                    right_input,
                    left_preprocessed: a.text,
                    right_preprocessed: b.text,
                    left_tokens: a.tokens,
                    right_tokens: b.tokens,
                    similarity,
                    vote,
                }
            }
            Compiled::Rule {
                rule,
                left: left_re,
                right: right_re,
            } => {
                let left_input = tables.concat_tuple(left, &rule.extract_left.attrs);
                let right_input = tables.concat_tuple(right, &rule.extract_right.attrs);
                let left_capture = first_capture(left_re, &left_input);
                let right_capture = first_capture(right_re, &right_input);
                let comparison = match (&left_capture, &right_capture) {
                    (Some(a), Some(b)) => compare(rule.comparator, a, b),
                    _ => None,
                };
                let vote = match comparison {
                    Some(true) => rule.when_true,
                    Some(false) => rule.when_false,
                    None => rule.when_missing,
                };
                LfTrace::Rule {
                    left_input,
                    right_input,
                    left_capture,
                    right_capture,
                    comparison,
                    vote,
                }
            }
        }
    }
}

fn first_capture(re: &Regex, text: &str) -> Option<String> {
    re.captures(text)
        .and_then(|c| c.get(1))
        .map(|m| m.as_str().to_string())
}

fn compare(comparator: Comparator, a: &str, b: &str) -> Option<bool> {
    let nums = a.trim().parse::<f64>().ok().zip(b.trim().parse::<f64>().ok());
    let equal = || match nums {
        Some((x, y)) => x == y,
        None => a.trim() == b.trim(),
    };
    match comparator {
        Comparator::Equal => Some(equal()),
        Comparator::NotEqual => Some(!equal()),
        Comparator::AbsoluteDiffGt(delta) => nums.map(|(x, y)| (x - y).abs() > delta),
    }
}

/// One-off evaluation of `spec` on `pair`.
pub fn evaluate(spec: &LabelFunctionSpec, pair: &CandidatePair, tables: &TablePair, corpus: &CorpusCache) -> Result<Vote> {
    Ok(CompiledLf::new(spec, tables, corpus)?.evaluate(pair, tables))
}

/// Dry run: evaluates `spec` on `pair` and returns every intermediate value.
pub fn trace(spec: &LabelFunctionSpec, pair: &CandidatePair, tables: &TablePair, corpus: &CorpusCache) -> Result<LfTrace> {
    tables
        .table(Side::Left)
        .get(&pair.left_id)
        .ok_or_else(|| Error::DanglingId { side: "left".into(), id: pair.left_id.clone() })?;
    tables
        .table(Side::Right)
        .get(&pair.right_id)
        .ok_or_else(|| Error::DanglingId { side: "right".into(), id: pair.right_id.clone() })?;
    Ok(CompiledLf::new(spec, tables, corpus)?.trace(pair, tables))
}
