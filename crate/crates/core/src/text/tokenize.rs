use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const PAD_CHAR: char = '#';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Tokenizer {
    /// Splits on runs of whitespace.
    Whitespace,
    /// Overlapping character q-grams of the whole string padded with `q - 1`
    /// pad characters on both ends.
    Qgram(usize),
    /// Whitespace words plus the padded q-grams of each word.
    WordQgram(usize),
}

impl Tokenizer {
    pub fn tokenize(self, text: &str) -> Vec<String> {
        match self {
            Tokenizer::Whitespace => text.split_whitespace().map(str::to_string).collect(),
            Tokenizer::Qgram(q) => qgrams(text, q),
            Tokenizer::WordQgram(q) => {
                let mut tokens = Vec::new();
                for word in text.split_whitespace() {
                    tokens.push(word.to_string());
                    tokens.extend(qgrams(word, q));
                }
                tokens
            }
        }
    }

    pub fn q(self) -> Option<usize> {
        match self {
            Tokenizer::Whitespace => None,
            Tokenizer::Qgram(q) | Tokenizer::WordQgram(q) => Some(q),
        }
    }
}

fn qgrams(text: &str, q: usize) -> Vec<String> {
    if text.is_empty() || q == 0 {
        return Vec::new();
    }
    let pad = q - 1;
    let chars: Vec<char> = std::iter::repeat_n(PAD_CHAR, pad)
        .chain(text.chars())
        .chain(std::iter::repeat_n(PAD_CHAR, pad))
        .collect();
    chars.windows(q).map(|w| w.iter().collect()).collect()
}

impl fmt::Display for Tokenizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tokenizer::Whitespace => f.write_str("whitespace"),
            Tokenizer::Qgram(q) => write!(f, "qgram({q})"),
            Tokenizer::WordQgram(q) => write!(f, "word+qgram({q})"),
        }
    }
}

impl FromStr for Tokenizer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "whitespace" {
            return Ok(Tokenizer::Whitespace);
        }
        let parse_q = |rest: &str| -> Result<usize, String> {
            rest.strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|n| n.trim().parse().ok())
                .ok_or_else(|| format!("malformed tokenizer {s:?}"))
        };
        if let Some(rest) = s.strip_prefix("word+qgram") {
            return parse_q(rest).map(Tokenizer::WordQgram);
        }
        if let Some(rest) = s.strip_prefix("qgram") {
            return parse_q(rest).map(Tokenizer::Qgram);
        }
        Err(format!("unknown tokenizer {s:?}"))
    }
}

impl TryFrom<String> for Tokenizer {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Tokenizer> for String {
    fn from(t: Tokenizer) -> String {
        t.to_string()
    }
}
