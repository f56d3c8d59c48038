use std::fmt;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::spec::{Comparator, Extraction, LabelFunctionSpec, LfBody};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// LF names double as file names in the project store.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.len() <= 128
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Every invariant violation of `spec` against `schema`. Empty means valid.
pub fn validate(spec: &LabelFunctionSpec, schema: &[String]) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if !valid_name(&spec.name) {
        diags.push(Diagnostic::new(
            "name",
            "name must be 1-128 characters from [A-Za-z0-9_-]",
        ));
    }
    match &spec.body {
        LfBody::Similarity(sim) => {
            check_attrs("similarity.attrs", &sim.attrs, schema, &mut diags);
            let hi = sim.match_if_sim_ge;
            let lo = sim.unmatch_if_sim_le;
            if hi.is_none() && lo.is_none() {
                diags.push(Diagnostic::new(
                    "similarity",
                    "at least one of match_if_sim_ge / unmatch_if_sim_le is required",
                ));
            }
            for (field, t) in [("similarity.match_if_sim_ge", hi), ("similarity.unmatch_if_sim_le", lo)] {
                if let Some(t) = t {
                    if !(0.0..=1.0).contains(&t) {
                        diags.push(Diagnostic::new(field, format!("threshold {t} outside [0, 1]")));
                    }
                }
            }
            if let (Some(hi), Some(lo)) = (hi, lo) {
                if lo >= hi || lo.is_nan() || hi.is_nan() {
                    diags.push(Diagnostic::new(
                        "similarity",
                        format!("t_lo < t_hi violated (unmatch_if_sim_le = {lo}, match_if_sim_ge = {hi})"),
                    ));
                }
            }
            if let Some(q) = sim.pipeline.tokenizer.q() {
                if q < 2 && !sim.pipeline.distance.is_string_distance() {
                    diags.push(Diagnostic::new("similarity.pipeline.tokenizer", format!("q must be >= 2, got {q}")));
                }
            }
        }
        LfBody::Rule(rule) => {
            check_extraction("rule.extract_left", &rule.extract_left, schema, &mut diags);
            check_extraction("rule.extract_right", &rule.extract_right, schema, &mut diags);
            if let Comparator::AbsoluteDiffGt(delta) = rule.comparator {
                if !(delta.is_finite() && delta >= 0.0) {
                    diags.push(Diagnostic::new(
                        "rule.comparator",
                        format!("absolute-diff-gt needs a finite nonnegative delta, got {delta}"),
                    ));
                }
            }
        }
    }
    diags
}

fn check_attrs(field: &str, attrs: &[String], schema: &[String], diags: &mut Vec<Diagnostic>) {
    if attrs.is_empty() {
        diags.push(Diagnostic::new(field, "at least one attribute is required"));
    }
    for attr in attrs {
        if !schema.contains(attr) {
            diags.push(Diagnostic::new(field, format!("unknown attribute {attr:?}")));
        }
    }
}

fn check_extraction(field: &str, ex: &Extraction, schema: &[String], diags: &mut Vec<Diagnostic>) {
    check_attrs(&format!("{field}.attrs"), &ex.attrs, schema, diags);
    match compile_pattern(&ex.pattern) {
        Ok(_) => {}
        Err(message) => diags.push(Diagnostic::new(format!("{field}.pattern"), message)),
    }
}

/// Compiles a pattern and checks it has exactly one capture group.
pub(crate) fn compile_pattern(pattern: &str) -> Result<Regex, String> {
    let re = regex::RegexBuilder::new(pattern)
        .size_limit(1 << 20)
        .build()
        .map_err(|e| format!("pattern does not compile: {e}"))?;
    let groups = re.captures_len() - 1;
    if groups != 1 {
        return Err(format!("pattern must have exactly one capture group, found {groups}"));
    }
    Ok(re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{Distance, PipelineConfig, Preprocess, Tokenizer, Weighting};

    fn schema() -> Vec<String> {
        vec!["name".into(), "description".into(), "price".into()]
    }

    fn sim(hi: Option<f64>, lo: Option<f64>) -> LabelFunctionSpec {
        LabelFunctionSpec::similarity(
            "name_overlap",
            &["name"],
            PipelineConfig::new(vec![Preprocess::Lowercase], Tokenizer::Whitespace, Weighting::Uniform, Distance::Jaccard),
            hi,
            lo,
        )
    }

    #[test]
    fn name_overlap_is_valid() {
        assert!(validate(&sim(Some(0.6), Some(0.1)), &schema()).is_empty());
    }

    #[test]
    fn equal_thresholds_rejected() {
        let diags = validate(&sim(Some(0.5), Some(0.5)), &schema());
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("t_lo < t_hi violated"));
    }

    #[test]
    fn threshold_presence_and_range() {
        assert!(!validate(&sim(None, None), &schema()).is_empty());
        assert!(!validate(&sim(Some(1.5), None), &schema()).is_empty());
        assert!(validate(&sim(None, Some(0.0)), &schema()).is_empty());
    }

    #[test]
    fn unknown_attribute_and_bad_name() {
        let mut spec = sim(Some(0.6), None);
        spec.name = "has space".into();
        spec.as_similarity_mut().unwrap().attrs = vec!["colour".into()];
        let diags = validate(&spec, &schema());
        assert_eq!(diags.len(), 2, "{diags:?}");
    }

    #[test]
    fn small_q_rejected() {
        let mut spec = sim(Some(0.6), None);
        spec.as_similarity_mut().unwrap().pipeline.tokenizer = Tokenizer::Qgram(1);
        assert_eq!(validate(&spec, &schema()).len(), 1);
    }

    #[test]
    fn capture_group_count() {
        assert!(compile_pattern(r"\d+").unwrap_err().contains("exactly one capture group"));
        assert!(compile_pattern(r"(\d+)x(\d+)").is_err());
        assert!(compile_pattern(r"(\d+)(?:in)").is_ok());
        assert!(compile_pattern(r"((").unwrap_err().contains("does not compile"));
    }

    #[test]
    fn rule_without_group_gives_diagnostic() {
        let text = super::super::spec::tests::SIZE_UNMATCH.replace("(\\\\d+)", "\\\\d+");
        let spec = LabelFunctionSpec::from_toml(&text).unwrap();
        let diags = validate(&spec, &schema());
        assert_eq!(diags.len(), 2, "{diags:?}");
        assert!(diags.iter().all(|d| d.field.ends_with(".pattern")));
    }
}
