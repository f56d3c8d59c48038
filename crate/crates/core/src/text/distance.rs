use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::weight::WeightedTokenSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Distance {
    /// Set Jaccard on distinct tokens; weights ignored.
    Jaccard,
    /// `1 - Σ min(w) / Σ max(w)`.
    WeightedJaccard,
    /// `1 - cos(a, b)`. Weights are nonnegative so this stays in `[0, 1]`.
    Cosine,
    /// Levenshtein distance over characters divided by the longer length.
    EditDistanceNormalized,
    /// `1 - |A ∩ B| / min(|A|, |B|)` on distinct tokens.
    OverlapCoefficient,
}

impl Distance {
    pub const ALL: [Distance; 5] = [
        Distance::Jaccard,
        Distance::WeightedJaccard,
        Distance::Cosine,
        Distance::EditDistanceNormalized,
        Distance::OverlapCoefficient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distance::Jaccard => "jaccard",
            Distance::WeightedJaccard => "weighted-jaccard",
            Distance::Cosine => "cosine",
            Distance::EditDistanceNormalized => "edit-distance-normalized",
            Distance::OverlapCoefficient => "overlap-coefficient",
        }
    }

    /// Edit distance works on strings; the others on token sets.
    pub fn is_string_distance(self) -> bool {
        self == Distance::EditDistanceNormalized
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Distance::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown distance {s:?}"))
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Operand<'a> {
    Tokens(&'a WeightedTokenSet),
    Text(&'a str),
}

/// Distance in `[0, 1]`; 0 for identical operands and for two empty
/// operands, 1 when exactly one operand is empty.
pub fn distance(a: Operand<'_>, b: Operand<'_>, kind: Distance) -> Result<f64> {
    match (a, b, kind.is_string_distance()) {
        (Operand::Text(a), Operand::Text(b), true) => Ok(normalized_edit_distance(a, b)),
        (Operand::Tokens(a), Operand::Tokens(b), false) => Ok(set_distance(a, b, kind)),
        (_, _, true) => Err(Error::OperandMismatch("edit distance takes text operands")),
        (_, _, false) => Err(Error::OperandMismatch("set distances take token-set operands")),
    }
}

fn set_distance(a: &WeightedTokenSet, b: &WeightedTokenSet, kind: Distance) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return 1.0,
        _ => {}
    }
    if a == b {
        return 0.0;
    }
    let sim = match kind {
        Distance::Jaccard => {
            let inter = intersection_size(a, b) as f64;
            inter / (a.len() as f64 + b.len() as f64 - inter)
        }
        Distance::OverlapCoefficient => intersection_size(a, b) as f64 / a.len().min(b.len()) as f64,
        Distance::WeightedJaccard => {
            let (mut lo, mut hi) = (0.0, 0.0);
            merge(a, b, |wa, wb| {
                lo += wa.min(wb);
                hi += wa.max(wb);
            });
            if hi > 0.0 {
                lo / hi
            } else {
                // Every weight is zero; fall back to token identity.
                same_tokens(a, b)
            }
        }
        Distance::Cosine => {
            let mut dot = 0.0;
            merge(a, b, |wa, wb| dot += wa * wb);
            let na = a.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            let nb = b.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
            if na == 0.0 || nb == 0.0 {
                same_tokens(a, b)
            } else {
                dot / (na * nb)
            }
        }
        Distance::EditDistanceNormalized => unreachable!("string distance"),
    };
    (1.0 - sim).clamp(0.0, 1.0)
}

fn same_tokens(a: &WeightedTokenSet, b: &WeightedTokenSet) -> f64 {
    if a.tokens().eq(b.tokens()) {
        1.0
    } else {
        0.0
    }
}

fn intersection_size(a: &WeightedTokenSet, b: &WeightedTokenSet) -> usize {
    let mut n = 0;
    merge_keys(a, b, |in_a, in_b| n += usize::from(in_a && in_b));
    n
}

/// Visits the sorted union of both token sets with missing weights as 0.
fn merge(a: &WeightedTokenSet, b: &WeightedTokenSet, mut f: impl FnMut(f64, f64)) {
    let mut ia = a.map().iter().peekable();
    let mut ib = b.map().iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some((ka, wa)), Some((kb, wb))) => match ka.cmp(kb) {
                Ordering::Less => {
                    f(**wa, 0.0);
                    ia.next();
                }
                Ordering::Greater => {
                    f(0.0, **wb);
                    ib.next();
                }
                Ordering::Equal => {
                    f(**wa, **wb);
                    ia.next();
                    ib.next();
                }
            },
            (Some((_, wa)), None) => {
                f(**wa, 0.0);
                ia.next();
            }
            (None, Some((_, wb))) => {
                f(0.0, **wb);
                ib.next();
            }
            (None, None) => break,
        }
    }
}

fn merge_keys(a: &WeightedTokenSet, b: &WeightedTokenSet, mut f: impl FnMut(bool, bool)) {
    let mut ia = a.tokens().peekable();
    let mut ib = b.tokens().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(ka), Some(kb)) => match ka.cmp(kb) {
                Ordering::Less => {
                    f(true, false);
                    ia.next();
                }
                Ordering::Greater => {
                    f(false, true);
                    ib.next();
                }
                Ordering::Equal => {
                    f(true, true);
                    ia.next();
                    ib.next();
                }
            },
            (Some(_), None) => {
                f(true, false);
                ia.next();
            }
            (None, Some(_)) => {
                f(false, true);
                ib.next();
            }
            (None, None) => break,
        }
    }
}

/// Levenshtein distance over chars (two-row dynamic program).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let subst = prev[j] + usize::from(ca != cb);
            cur[j + 1] = subst.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

pub fn normalized_edit_distance(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    levenshtein(a, b) as f64 / longest as f64
}
