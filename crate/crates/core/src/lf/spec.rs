use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::labels::Vote;
use crate::text::PipelineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    User,
    Auto,
}

/// Votes +1 when similarity reaches `match_if_sim_ge`, −1 when it falls to
/// `unmatch_if_sim_le`, and abstains in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilarityLf {
    pub attrs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_if_sim_ge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unmatch_if_sim_le: Option<f64>,
    pub pipeline: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Extraction {
    pub attrs: Vec<String>,
    /// Regular expression with exactly one capture group.
    pub pattern: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Comparator {
    /// Numeric equality when both captures parse as numbers, string
    /// equality otherwise.
    Equal,
    NotEqual,
    /// Both captures must parse as numbers; otherwise the rule treats the
    /// extraction as missing.
    AbsoluteDiffGt(f64),
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comparator::Equal => f.write_str("equal"),
            Comparator::NotEqual => f.write_str("not-equal"),
            Comparator::AbsoluteDiffGt(delta) => write!(f, "absolute-diff-gt({delta})"),
        }
    }
}

impl FromStr for Comparator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "equal" => Ok(Comparator::Equal),
            "not-equal" => Ok(Comparator::NotEqual),
            other => other
                .strip_prefix("absolute-diff-gt(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.trim().parse::<f64>().ok())
                .map(Comparator::AbsoluteDiffGt)
                .ok_or_else(|| format!("unknown comparator {s:?}")),
        }
    }
}

impl TryFrom<String> for Comparator {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Comparator> for String {
    fn from(c: Comparator) -> String {
        c.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleLf {
    pub comparator: Comparator,
    pub when_true: Vote,
    pub when_false: Vote,
    /// Fires when either side's extraction finds nothing.
    pub when_missing: Vote,
    pub extract_left: Extraction,
    pub extract_right: Extraction,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LfBody {
    Similarity(SimilarityLf),
    Rule(RuleLf),
}

/// A declarative labeling function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StoredSpec", into = "StoredSpec")]
pub struct LabelFunctionSpec {
    pub name: String,
    pub origin: Origin,
    pub body: LfBody,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredSpec {
    name: String,
    origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    similarity: Option<SimilarityLf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rule: Option<RuleLf>,
}

impl TryFrom<StoredSpec> for LabelFunctionSpec {
    type Error = String;

    fn try_from(s: StoredSpec) -> Result<Self, String> {
        let body = match (s.similarity, s.rule) {
            (Some(sim), None) => LfBody::Similarity(sim),
            (None, Some(rule)) => LfBody::Rule(rule),
            (None, None) => return Err("spec needs a [similarity] or a [rule] section".into()),
            (Some(_), Some(_)) => return Err("spec cannot have both [similarity] and [rule]".into()),
        };
        Ok(Self {
            name: s.name,
            origin: s.origin,
            body,
        })
    }
}

impl From<LabelFunctionSpec> for StoredSpec {
    fn from(spec: LabelFunctionSpec) -> Self {
        let (similarity, rule) = match spec.body {
            LfBody::Similarity(s) => (Some(s), None),
            LfBody::Rule(r) => (None, Some(r)),
        };
        Self {
            name: spec.name,
            origin: spec.origin,
            similarity,
            rule,
        }
    }
}

/// Content hash of a spec's canonical serialization.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LfVersion(pub String);

impl fmt::Display for LfVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl LabelFunctionSpec {
    pub fn similarity(
        name: impl Into<String>,
        attrs: &[&str],
        pipeline: PipelineConfig,
        match_if_sim_ge: Option<f64>,
        unmatch_if_sim_le: Option<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            origin: Origin::User,
            body: LfBody::Similarity(SimilarityLf {
                attrs: attrs.iter().map(|a| a.to_string()).collect(),
                match_if_sim_ge,
                unmatch_if_sim_le,
                pipeline,
            }),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map(|span| text[..span.start.min(text.len())].lines().count().max(1) as u64);
            Error::parse(line, e.message().to_string())
        })
    }

    /// Canonical serialization: fixed field order, used for hashing and
    /// storage.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes to TOML")
    }

    pub fn version(&self) -> LfVersion {
        LfVersion(hex::encode(Sha256::digest(self.to_toml().as_bytes())))
    }

    pub fn as_similarity(&self) -> Option<&SimilarityLf> {
        match &self.body {
            LfBody::Similarity(s) => Some(s),
            LfBody::Rule(_) => None,
        }
    }

    pub fn as_similarity_mut(&mut self) -> Option<&mut SimilarityLf> {
        match &mut self.body {
            LfBody::Similarity(s) => Some(s),
            LfBody::Rule(_) => None,
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::text::{Distance, Preprocess, Tokenizer, Weighting};

    pub(crate) const SIZE_UNMATCH: &str = r#"
name = "size_unmatch"
origin = "user"

[rule]
comparator = "not-equal"
when_true = -1
when_false = 0
when_missing = 0

[rule.extract_left]
attrs = ["name", "description"]
pattern = "(\\d+)\\s*(?:\"|'|inch)"

[rule.extract_right]
attrs = ["name", "description"]
pattern = "(\\d+)\\s*(?:\"|'|inch)"
"#;

    fn name_overlap() -> LabelFunctionSpec {
        LabelFunctionSpec::similarity(
            "name_overlap",
            &["name"],
            PipelineConfig::new(vec![Preprocess::Lowercase], Tokenizer::Whitespace, Weighting::Uniform, Distance::Jaccard),
            Some(0.6),
            Some(0.1),
        )
    }

    #[test]
    fn rule_spec_parses() {
        let spec = LabelFunctionSpec::from_toml(SIZE_UNMATCH).unwrap();
        let LfBody::Rule(rule) = &spec.body else { panic!("rule expected") };
        assert_eq!(rule.comparator, Comparator::NotEqual);
        assert_eq!(rule.when_true, Vote::Unmatch);
        assert_eq!(LabelFunctionSpec::from_toml(&spec.to_toml()).unwrap(), spec);
    }

    #[test]
    fn canonical_form_ignores_key_order() {
        let a = name_overlap();
        let reordered = r#"
origin = "user"
name = "name_overlap"
[similarity]
unmatch_if_sim_le = 0.1
match_if_sim_ge = 0.6
attrs = ["name"]
[similarity.pipeline]
distance = "jaccard"
weighting = "uniform"
tokenizer = "whitespace"
preprocess = ["lowercase"]
"#;
        let b = LabelFunctionSpec::from_toml(reordered).unwrap();
        assert_eq!(a.version(), b.version());
    }

    #[test]
    fn threshold_edit_changes_version() {
        let a = name_overlap();
        let mut b = a.clone();
        b.as_similarity_mut().unwrap().match_if_sim_ge = Some(0.4);
        assert_ne!(a.version(), b.version());
    }

    #[test]
    fn structural_errors() {
        assert!(LabelFunctionSpec::from_toml("name = \"x\"\norigin = \"user\"\n").is_err());
        assert!(LabelFunctionSpec::from_toml("name = \"x\"\norigin = \"robot\"\n").is_err());
        let err = LabelFunctionSpec::from_toml("name = \"x\"\norigin = \"user\"\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn comparator_strings() {
        for c in [Comparator::Equal, Comparator::NotEqual, Comparator::AbsoluteDiffGt(2.5)] {
            assert_eq!(c.to_string().parse::<Comparator>().unwrap(), c);
        }
    }
}
