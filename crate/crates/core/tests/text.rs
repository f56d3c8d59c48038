use std::collections::{HashMap, HashSet};

use matchwork_core::text::{
    distance, idf, levenshtein, normalized_edit_distance, preprocess, weigh, CorpusStats, Distance, Operand,
    PipelineConfig, Preprocess, Tokenizer, WeightedTokenSet, Weighting,
};
use proptest::prelude::*;

fn text() -> impl Strategy<Value = String> {
    proptest::string::string_regex("[a-cA-C1 ,.\\-éΩ]{0,14}").unwrap()
}

fn tokenizer() -> impl Strategy<Value = Tokenizer> {
    prop_oneof![
        Just(Tokenizer::Whitespace),
        (1usize..4).prop_map(Tokenizer::Qgram),
        (2usize..4).prop_map(Tokenizer::WordQgram),
    ]
}

fn pipeline() -> impl Strategy<Value = PipelineConfig> {
    (
        proptest::sample::subsequence(Preprocess::ALL.to_vec(), 0..=4),
        tokenizer(),
        prop_oneof![Just(Weighting::Uniform), Just(Weighting::TfIdf)],
        proptest::sample::select(Distance::ALL.to_vec()),
    )
        .prop_map(|(p, t, w, d)| PipelineConfig::new(p, t, w, d))
}

/// Textbook Levenshtein over the full (n+1)×(m+1) table.
fn levenshtein_oracle(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in table[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            table[i][j] = (table[i - 1][j] + 1).min(table[i][j - 1] + 1).min(table[i - 1][j - 1] + cost);
        }
    }
    table[a.len()][b.len()]
}

fn jaccard_oracle(a: &[String], b: &[String]) -> f64 {
    let a: HashSet<&String> = a.iter().collect();
    let b: HashSet<&String> = b.iter().collect();
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    1.0 - a.intersection(&b).count() as f64 / a.union(&b).count() as f64
}

fn cosine_oracle(a: &HashMap<String, f64>, b: &HashMap<String, f64>) -> f64 {
    let dot: f64 = a.iter().map(|(t, w)| w * b.get(t).copied().unwrap_or(0.0)).sum();
    let norm = |m: &HashMap<String, f64>| m.values().map(|w| w * w).sum::<f64>().sqrt();
    1.0 - dot / (norm(a) * norm(b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn distances_are_symmetric_bounded_and_zero_on_identity(a in text(), b in text(), p in pipeline()) {
        let docs: Vec<Vec<String>> = [&a, &b].iter().map(|s| p.prepare(s).tokens).collect();
        let corpus = CorpusStats::from_documents(docs.iter().map(Vec::as_slice));
        let corpus = p.needs_corpus().then_some(&corpus);
        let ab = p.similarity(&a, &b, corpus).unwrap();
        let ba = p.similarity(&b, &a, corpus).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert_eq!(p.similarity(&a, &a, corpus).unwrap(), 1.0);
    }

    #[test]
    fn jaccard_matches_set_oracle_and_uniform_weighted_jaccard(a in text(), b in text(), t in tokenizer()) {
        let (ta, tb) = (t.tokenize(&a), t.tokenize(&b));
        let (wa, wb) = (WeightedTokenSet::uniform(ta.clone()), WeightedTokenSet::uniform(tb.clone()));
        let j = distance(Operand::Tokens(&wa), Operand::Tokens(&wb), Distance::Jaccard).unwrap();
        let wj = distance(Operand::Tokens(&wa), Operand::Tokens(&wb), Distance::WeightedJaccard).unwrap();
        let expected = if ta.is_empty() != tb.is_empty() { 1.0 } else { jaccard_oracle(&ta, &tb) };
        prop_assert!((j - expected).abs() <= 1e-12);
        prop_assert!((j - wj).abs() <= 1e-12);
    }

    #[test]
    fn edit_distance_matches_table_oracle(a in text(), b in text()) {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein_oracle(&a, &b));
        let longest = a.chars().count().max(b.chars().count());
        let expected = if longest == 0 { 0.0 } else { levenshtein_oracle(&a, &b) as f64 / longest as f64 };
        prop_assert!((normalized_edit_distance(&a, &b) - expected).abs() <= 1e-15);
    }

    #[test]
    fn tfidf_cosine_matches_direct_formula(a in "[abc ]{1,12}", b in "[abc ]{1,12}", others in proptest::collection::vec("[abcd ]{0,8}", 0..6)) {
        let tokenize = |s: &str| Tokenizer::Whitespace.tokenize(s);
        let docs: Vec<Vec<String>> = [a.as_str(), b.as_str()].into_iter().chain(others.iter().map(String::as_str)).map(tokenize).collect();
        let corpus = CorpusStats::from_documents(docs.iter().map(Vec::as_slice));
        let n = docs.len();
        let vector = |tokens: &[String]| {
            let mut m: HashMap<String, f64> = HashMap::new();
            for t in tokens {
                *m.entry(t.clone()).or_default() += 1.0;
            }
            for (t, w) in m.iter_mut() {
                let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
                *w *= ((n as f64 + 1.0) / (df + 1.0)).ln();
            }
            m
        };
        let (va, vb) = (vector(&docs[0]), vector(&docs[1]));
        prop_assume!(!va.is_empty() && !vb.is_empty() && va.values().any(|&w| w > 0.0) && vb.values().any(|&w| w > 0.0));
        let wa = weigh(&docs[0], Weighting::TfIdf, Some(&corpus)).unwrap();
        let wb = weigh(&docs[1], Weighting::TfIdf, Some(&corpus)).unwrap();
        let got = distance(Operand::Tokens(&wa), Operand::Tokens(&wb), Distance::Cosine).unwrap();
        let expected = if wa == wb { 0.0 } else { cosine_oracle(&va, &vb).clamp(0.0, 1.0) };
        prop_assert!((got - expected).abs() <= 1e-12, "{} vs {}", got, expected);
    }

    #[test]
    fn preprocessing_is_idempotent(s in text(), steps in proptest::sample::subsequence(vec![Preprocess::Lowercase, Preprocess::StripPunctuation, Preprocess::CollapseWhitespace], 0..=3)) {
        let once = preprocess(&s, &steps);
        prop_assert_eq!(preprocess(&once, &steps), once);
    }
}

#[test]
fn idf_is_nonincreasing_in_document_frequency() {
    for n in [1usize, 5, 100] {
        for df in 0..n {
            assert!(idf(n, df + 1) <= idf(n, df));
        }
    }
}

#[test]
fn screen_size_pair_has_jaccard_one_half() {
    let p = PipelineConfig::new(vec![Preprocess::Lowercase], Tokenizer::Whitespace, Weighting::Uniform, Distance::Jaccard);
    assert_eq!(p.similarity("Sony Bravia 40\"", "sony bravia 46\"", None).unwrap(), 0.5);
}

#[test]
fn kitten_sitting() {
    assert_eq!(normalized_edit_distance("kitten", "sitting"), 3.0 / 7.0);
}
