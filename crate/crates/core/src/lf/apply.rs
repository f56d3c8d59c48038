use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::{CompiledLf, CorpusCache};
use super::spec::LabelFunctionSpec;
use crate::candidates::CandidateSet;
use crate::error::{Error, Result};
use crate::labels::{LabelMatrix, Vote};
use crate::table::TablePair;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplyReport {
    /// Number of single (LF, pair) evaluations performed.
    pub evaluations: usize,
    pub recomputed: Vec<String>,
    pub reused: Vec<String>,
    pub dropped: Vec<String>,
}

/// Applies `specs` over `candidates`, reusing every column of `existing`
/// whose LF version is unchanged. The result equals a from-scratch
/// application.
pub fn apply_all(
    specs: &[LabelFunctionSpec],
    candidates: &CandidateSet,
    existing: Option<&LabelMatrix>,
    tables: &TablePair,
    corpus: &CorpusCache,
) -> Result<(LabelMatrix, ApplyReport)> {
    let mut names = HashSet::new();
    for spec in specs {
        if !names.insert(spec.name.as_str()) {
            return Err(Error::InvalidParameter(format!("duplicate LF name {:?}", spec.name)));
        }
    }
    let fingerprint = candidates.fingerprint();
    let existing = existing.filter(|m| m.candidates_fingerprint() == fingerprint && m.n_pairs() == candidates.len());

    let mut report = ApplyReport::default();
    let mut matrix = LabelMatrix::empty(fingerprint, candidates.len());
    for spec in specs {
        let version = spec.version().0;
        let cached = existing.and_then(|m| {
            m.lf_index(&spec.name)
                .filter(|&j| m.versions()[j] == version)
                .map(|j| m.column(j).to_vec())
        });
        let column = match cached {
            Some(column) => {
                report.reused.push(spec.name.clone());
                column
            }
            None => {
                let lf = CompiledLf::new(spec, tables, corpus)?;
                report.evaluations += candidates.len();
                report.recomputed.push(spec.name.clone());
                compute_column(&lf, candidates, tables)
            }
        };
        matrix.push_column(spec.name.clone(), version, column);
    }
    if let Some(m) = existing {
        report.dropped = m
            .lf_ids()
            .iter()
            .filter(|id| !names.contains(id.as_str()))
            .cloned()
            .collect();
    }
    Ok((matrix, report))
}

fn compute_column(lf: &CompiledLf, candidates: &CandidateSet, tables: &TablePair) -> Vec<Vote> {
    candidates
        .pairs()
        .par_iter()
        .map(|pair| lf.evaluate(pair, tables))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfRawStats {
    pub lf_id: String,
    pub n_match: usize,
    pub n_unmatch: usize,
    pub n_abstain: usize,
    /// `1 - n_abstain / n_pairs`.
    pub coverage: f64,
}

pub fn lf_raw_stats(matrix: &LabelMatrix) -> Vec<LfRawStats> {
    let n = matrix.n_pairs();
    matrix
        .lf_ids()
        .iter()
        .zip(matrix.columns())
        .map(|(id, column)| {
            let count = |v: Vote| column.iter().filter(|&&x| x == v).count();
            let n_abstain = count(Vote::Abstain);
            LfRawStats {
                lf_id: id.clone(),
                n_match: count(Vote::Match),
                n_unmatch: count(Vote::Unmatch),
                n_abstain,
                coverage: if n == 0 { 0.0 } else { 1.0 - n_abstain as f64 / n as f64 },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidates::CandidatePair;
    use crate::table::RawTable;
    use crate::text::{Distance, PipelineConfig, Preprocess, Tokenizer, Weighting};
    use Vote::*;

    fn fixture() -> (TablePair, CandidateSet) {
        let left = RawTable::from_reader(
            "id,name\nL1,sony bravia 40 lcd\nL2,canon powershot a590\nL3,apple ipod nano 8gb\n".as_bytes(),
            "id",
            "left",
        )
        .unwrap();
        let right = RawTable::from_reader(
            "id,name\nR1,sony bravia 40 lcd tv\nR2,canon a590 powershot camera\nR3,ipod touch\n".as_bytes(),
            "id",
            "right",
        )
        .unwrap();
        let tables = TablePair::align(left, right).unwrap();
        let mut pairs = Vec::new();
        for l in ["L1", "L2", "L3"] {
            for r in ["R1", "R2", "R3"] {
                pairs.push(CandidatePair { left_id: l.into(), right_id: r.into(), block_key: "b".into(), similarity_hint: 0.5 });
            }
        }
        (tables, CandidateSet::new(pairs))
    }

    fn lf(name: &str, hi: f64) -> LabelFunctionSpec {
        LabelFunctionSpec::similarity(
            name,
            &["name"],
            PipelineConfig::new(vec![Preprocess::Lowercase], Tokenizer::Whitespace, Weighting::Uniform, Distance::Jaccard),
            Some(hi),
            Some(0.05),
        )
    }

    #[test]
    fn unchanged_specs_are_cache_hits() {
        let (tables, cands) = fixture();
        let corpus = CorpusCache::new();
        let specs = vec![lf("a", 0.4), lf("b", 0.6)];
        let (m1, r1) = apply_all(&specs, &cands, None, &tables, &corpus).unwrap();
        assert_eq!(r1.evaluations, 18);
        let (m2, r2) = apply_all(&specs, &cands, Some(&m1), &tables, &corpus).unwrap();
        assert_eq!(r2.evaluations, 0);
        assert_eq!(m1, m2);
    }

    #[test]
    fn threshold_edit_recomputes_one_column() {
        let (tables, cands) = fixture();
        let corpus = CorpusCache::new();
        let mut specs = vec![lf("name_overlap", 0.4), lf("other", 0.6)];
        let (m1, _) = apply_all(&specs, &cands, None, &tables, &corpus).unwrap();
        specs[0].as_similarity_mut().unwrap().match_if_sim_ge = Some(0.6);
        let (m2, report) = apply_all(&specs, &cands, Some(&m1), &tables, &corpus).unwrap();
        assert_eq!(report.recomputed, ["name_overlap"]);
        assert_eq!(report.evaluations, cands.len());
        let (scratch, _) = apply_all(&specs, &cands, None, &tables, &corpus).unwrap();
        assert_eq!(m2.to_bytes(), scratch.to_bytes());
    }

    #[test]
    fn removed_lf_is_dropped() {
        let (tables, cands) = fixture();
        let corpus = CorpusCache::new();
        let (m1, _) = apply_all(&[lf("a", 0.4), lf("b", 0.6)], &cands, None, &tables, &corpus).unwrap();
        let (m2, report) = apply_all(&[lf("b", 0.6)], &cands, Some(&m1), &tables, &corpus).unwrap();
        assert_eq!(m2.lf_ids(), ["b"]);
        assert_eq!(report.dropped, ["a"]);
        assert_eq!(report.evaluations, 0);
    }

    #[test]
    fn duplicate_names_rejected() {
        let (tables, cands) = fixture();
        assert!(apply_all(&[lf("a", 0.4), lf("a", 0.6)], &cands, None, &tables, &CorpusCache::new()).is_err());
    }

    #[test]
    fn raw_stats_counts() {
        let m = LabelMatrix::from_rows(&[vec![Match], vec![Match], vec![Unmatch], vec![Abstain]]);
        let s = &lf_raw_stats(&m)[0];
        assert_eq!((s.n_match, s.n_unmatch, s.n_abstain), (2, 1, 1));
        assert_eq!(s.coverage, 0.75);
        let silent = LabelMatrix::from_rows(&[vec![Abstain], vec![Abstain]]);
        assert_eq!(lf_raw_stats(&silent)[0].coverage, 0.0);
    }
}
