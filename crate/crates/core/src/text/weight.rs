use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weighting {
    Uniform,
    TfIdf,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Uniform => "uniform",
            Weighting::TfIdf => "tf-idf",
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(Weighting::Uniform),
            "tf-idf" => Ok(Weighting::TfIdf),
            _ => Err(format!("unknown weighting {s:?}")),
        }
    }
}

/// Token → nonnegative weight. Ordered so float reductions are
/// deterministic.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedTokenSet(BTreeMap<String, f64>);

impl WeightedTokenSet {
    pub fn new(tokens: BTreeMap<String, f64>) -> Self {
        debug_assert!(tokens.values().all(|w| *w >= 0.0));
        Self(tokens)
    }

    pub fn uniform<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self(tokens.into_iter().map(|t| (t.into(), 1.0)).collect())
    }

    pub fn get(&self, token: &str) -> Option<f64> {
        self.0.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub(crate) fn map(&self) -> &BTreeMap<String, f64> {
        &self.0
    }
}

/// Document frequencies over a corpus of token multisets.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusStats {
    n_docs: usize,
    df: HashMap<String, usize>,
}

impl CorpusStats {
    pub fn from_documents<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a [String]>,
    {
        let mut stats = Self::default();
        for doc in docs {
            stats.n_docs += 1;
            let distinct: HashSet<&String> = doc.iter().collect();
            for token in distinct {
                *stats.df.entry(token.clone()).or_default() += 1;
            }
        }
        stats
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn df(&self, token: &str) -> usize {
        self.df.get(token).copied().unwrap_or(0)
    }

    /// `ln((N + 1) / (df + 1))`; unseen tokens have df = 0.
    pub fn idf(&self, token: &str) -> f64 {
        idf(self.n_docs, self.df(token))
    }
}

pub fn idf(n_docs: usize, df: usize) -> f64 {
    ((n_docs as f64 + 1.0) / (df as f64 + 1.0)).ln()
}

pub fn weigh(tokens: &[String], weighting: Weighting, corpus: Option<&CorpusStats>) -> Result<WeightedTokenSet> {
    match weighting {
        Weighting::Uniform => Ok(WeightedTokenSet::uniform(tokens.iter().cloned())),
        Weighting::TfIdf => {
            let corpus = corpus.ok_or(Error::MissingCorpusStats)?;
            let mut tf: BTreeMap<String, f64> = BTreeMap::new();
            for t in tokens {
                *tf.entry(t.clone()).or_default() += 1.0;
            }
            for (token, w) in tf.iter_mut() {
                *w *= corpus.idf(token);
            }
            Ok(WeightedTokenSet(tf))
        }
    }
}
