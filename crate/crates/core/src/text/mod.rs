//! Built-in text utilities for writing labeling functions, organized along
//! four dimensions: preprocessing, tokenization, token weighting and
//! distance.
//!
//! Labeling-function thresholds are expressed on `similarity = 1 - distance`.

mod distance;
mod preprocess;
mod tokenize;
mod weight;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use distance::{distance, levenshtein, normalized_edit_distance, Distance, Operand};
pub use preprocess::{preprocess, Preprocess};
pub use tokenize::{Tokenizer, PAD_CHAR};
pub use weight::{idf, weigh, CorpusStats, WeightedTokenSet, Weighting};

use crate::error::Result;

/// One instantiation of the four utility dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub preprocess: Vec<Preprocess>,
    pub tokenizer: Tokenizer,
    pub weighting: Weighting,
    pub distance: Distance,
}

/// Intermediate values of a pipeline run on one string.
#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub text: String,
    pub tokens: Vec<String>,
}

impl PipelineConfig {
    pub fn new(preprocess: Vec<Preprocess>, tokenizer: Tokenizer, weighting: Weighting, distance: Distance) -> Self {
        Self {
            preprocess,
            tokenizer,
            weighting,
            distance,
        }
    }

    pub fn needs_corpus(&self) -> bool {
        !self.distance.is_string_distance() && self.weighting == Weighting::TfIdf
    }

    pub fn prepare(&self, text: &str) -> Prepared {
        let text = preprocess(text, &self.preprocess);
        let tokens = if self.distance.is_string_distance() {
            Vec::new()
        } else {
            self.tokenizer.tokenize(&text)
        };
        Prepared { text, tokens }
    }

    pub fn distance_prepared(&self, a: &Prepared, b: &Prepared, corpus: Option<&CorpusStats>) -> Result<f64> {
        if self.distance.is_string_distance() {
            return distance(Operand::Text(&a.text), Operand::Text(&b.text), self.distance);
        }
        let wa = weigh(&a.tokens, self.weighting, corpus)?;
        let wb = weigh(&b.tokens, self.weighting, corpus)?;
        distance(Operand::Tokens(&wa), Operand::Tokens(&wb), self.distance)
    }

    pub fn similarity(&self, a: &str, b: &str, corpus: Option<&CorpusStats>) -> Result<f64> {
        let d = self.distance_prepared(&self.prepare(a), &self.prepare(b), corpus)?;
        Ok(1.0 - d)
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let steps: Vec<&str> = self.preprocess.iter().map(|p| p.name()).collect();
        if self.distance.is_string_distance() {
            write!(f, "[{}] {}", steps.join(","), self.distance)
        } else {
            write!(f, "[{}] {} {} {}", steps.join(","), self.tokenizer, self.weighting, self.distance)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_whitespace_jaccard_similarity() {
        let cfg = PipelineConfig::new(
            vec![Preprocess::Lowercase],
            Tokenizer::Whitespace,
            Weighting::Uniform,
            Distance::Jaccard,
        );
        assert_eq!(cfg.similarity("Sony Bravia 40\"", "sony bravia 46\"", None).unwrap(), 0.5);
        assert_eq!(cfg.similarity("Sony", "SONY", None).unwrap(), 1.0);
    }

    #[test]
    fn edit_distance_ignores_tokenizer_and_weighting() {
        let a = PipelineConfig::new(vec![], Tokenizer::Whitespace, Weighting::TfIdf, Distance::EditDistanceNormalized);
        let b = PipelineConfig::new(vec![], Tokenizer::Qgram(3), Weighting::Uniform, Distance::EditDistanceNormalized);
        // no corpus needed even though weighting is tf-idf
        let sa = a.similarity("kitten", "sitting", None).unwrap();
        let sb = b.similarity("kitten", "sitting", None).unwrap();
        assert_eq!(sa, sb);
        assert!((sa - 4.0 / 7.0).abs() < 1e-15);
        assert!(!a.needs_corpus());
    }

    #[test]
    fn toml_form() {
        let cfg = PipelineConfig::new(
            vec![Preprocess::Lowercase, Preprocess::Stem],
            Tokenizer::Qgram(3),
            Weighting::TfIdf,
            Distance::WeightedJaccard,
        );
        let text = toml::to_string(&cfg).unwrap();
        assert!(text.contains("tokenizer = \"qgram(3)\""), "{text}");
        assert!(text.contains("weighting = \"tf-idf\""), "{text}");
        assert_eq!(toml::from_str::<PipelineConfig>(&text).unwrap(), cfg);
    }
}
