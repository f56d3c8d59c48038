use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preprocess {
    Lowercase,
    /// Replaces punctuation characters with spaces.
    StripPunctuation,
    /// Trims and collapses whitespace runs to a single space.
    CollapseWhitespace,
    /// Snowball English (Porter2) stemming of each whitespace-delimited word.
    Stem,
}

impl Preprocess {
    pub const ALL: [Preprocess; 4] = [
        Preprocess::Lowercase,
        Preprocess::StripPunctuation,
        Preprocess::CollapseWhitespace,
        Preprocess::Stem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preprocess::Lowercase => "lowercase",
            Preprocess::StripPunctuation => "strip-punctuation",
            Preprocess::CollapseWhitespace => "collapse-whitespace",
            Preprocess::Stem => "stem",
        }
    }

    pub fn apply(self, text: &str) -> String {
        match self {
            Preprocess::Lowercase => text.to_lowercase(),
            Preprocess::StripPunctuation => text
                .chars()
                .map(|c| if is_punctuation(c) { ' ' } else { c })
                .collect(),
            Preprocess::CollapseWhitespace => text.split_whitespace().collect::<Vec<_>>().join(" "),
            Preprocess::Stem => stem_words(text),
        }
    }
}

impl fmt::Display for Preprocess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preprocess {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Preprocess::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preprocessing step {s:?}"))
    }
}

fn is_punctuation(c: char) -> bool {
    c.is_ascii_punctuation() || (!c.is_alphanumeric() && !c.is_whitespace() && !c.is_control())
}

fn stemmer() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

// Whitespace between words is preserved as-is.
fn stem_words(text: &str) -> String {
    let stemmer = stemmer();
    let mut out = String::with_capacity(text.len());
    let mut word_start = None;
    for (i, c) in text.char_indices() {
        match (c.is_whitespace(), word_start) {
            (true, Some(start)) => {
                out.push_str(&stemmer.stem(&text[start..i]));
                out.push(c);
                word_start = None;
            }
            (true, None) => out.push(c),
            (false, None) => word_start = Some(i),
            (false, Some(_)) => {}
        }
    }
    if let Some(start) = word_start {
        out.push_str(&stemmer.stem(&text[start..]));
    }
    out
}

/// Applies `steps` in order.
pub fn preprocess(text: &str, steps: &[Preprocess]) -> String {
    steps
        .iter()
        .fold(text.to_string(), |acc, step| step.apply(&acc))
}
