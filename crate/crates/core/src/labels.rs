//! Votes, the label matrix, and ground-truth labels.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::candidates::PairKey;
use crate::error::{Error, Result};

/// A labeling-function output: non-match, abstain or match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
#[repr(i8)]
pub enum Vote {
    Unmatch = -1,
    Abstain = 0,
    Match = 1,
}

impl Vote {
    pub const ALL: [Vote; 3] = [Vote::Unmatch, Vote::Abstain, Vote::Match];

    pub fn value(self) -> i8 {
        self as i8
    }

    fn symbol(self) -> char {
        match self {
            Vote::Unmatch => '-',
            Vote::Abstain => '0',
            Vote::Match => '+',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            '-' => Some(Vote::Unmatch),
            '0' => Some(Vote::Abstain),
            '+' => Some(Vote::Match),
            _ => None,
        }
    }
}

impl TryFrom<i8> for Vote {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            -1 => Ok(Vote::Unmatch),
            0 => Ok(Vote::Abstain),
            1 => Ok(Vote::Match),
            other => Err(format!("vote must be -1, 0 or 1, got {other}")),
        }
    }
}

impl From<Vote> for i8 {
    fn from(v: Vote) -> i8 {
        v.value()
    }
}

impl fmt::Display for Vote {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

/// One column of votes per labeling function, each tagged with the spec
/// version that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelMatrix {
    candidates: String,
    n_pairs: usize,
    lf_ids: Vec<String>,
    versions: Vec<String>,
    columns: Vec<Vec<Vote>>,
}

impl LabelMatrix {
    /// An empty matrix over `n_pairs` candidates identified by their
    /// fingerprint.
    pub fn empty(candidates_fingerprint: impl Into<String>, n_pairs: usize) -> Self {
        Self {
            candidates: candidates_fingerprint.into(),
            n_pairs,
            ..Self::default()
        }
    }

    /// Builds a matrix directly from vote rows; columns are named `lf0`,
    /// `lf1`, ... with empty versions. Mostly useful for tests and
    /// experiments that bypass the LF engine.
    pub fn from_rows(rows: &[Vec<Vote>]) -> Self {
        let n_lfs = rows.first().map_or(0, Vec::len);
        let mut m = Self::empty("", rows.len());
        for j in 0..n_lfs {
            let column = rows.iter().map(|r| r[j]).collect();
            m.push_column(format!("lf{j}"), String::new(), column);
        }
        m
    }

    pub fn candidates_fingerprint(&self) -> &str {
        &self.candidates
    }

    pub(crate) fn push_column(&mut self, lf_id: String, version: String, column: Vec<Vote>) {
        assert_eq!(column.len(), self.n_pairs, "column length must equal pair count");
        self.lf_ids.push(lf_id);
        self.versions.push(version);
        self.columns.push(column);
    }

    pub fn n_pairs(&self) -> usize {
        self.n_pairs
    }

    pub fn n_lfs(&self) -> usize {
        self.lf_ids.len()
    }

    pub fn lf_ids(&self) -> &[String] {
        &self.lf_ids
    }

    pub fn versions(&self) -> &[String] {
        &self.versions
    }

    pub fn lf_index(&self, lf_id: &str) -> Option<usize> {
        self.lf_ids.iter().position(|id| id == lf_id)
    }

    pub fn column(&self, lf: usize) -> &[Vote] {
        &self.columns[lf]
    }

    pub fn columns(&self) -> &[Vec<Vote>] {
        &self.columns
    }

    #[inline]
    pub fn vote(&self, pair: usize, lf: usize) -> Vote {
        self.columns[lf][pair]
    }

    pub fn row(&self, pair: usize) -> Vec<Vote> {
        self.columns.iter().map(|c| c[pair]).collect()
    }

    /// True when at least one vote is not an abstention.
    pub fn has_votes(&self) -> bool {
        self.columns.iter().flatten().any(|&v| v != Vote::Abstain)
    }

    /// Canonical serialized form; two matrices are equal iff their bytes are.
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(&self.to_stored()).expect("matrix serializes")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let stored: StoredMatrix =
            serde_json::from_slice(bytes).map_err(|e| Error::parse(Some(e.line() as u64), e.to_string()))?;
        Self::from_stored(stored)
    }

    fn to_stored(&self) -> StoredMatrix {
        StoredMatrix {
            format_version: MATRIX_FORMAT_VERSION,
            candidates: self.candidates.clone(),
            n_pairs: self.n_pairs,
            columns: self
                .lf_ids
                .iter()
                .zip(&self.versions)
                .zip(&self.columns)
                .map(|((id, version), votes)| StoredColumn {
                    lf_id: id.clone(),
                    version: version.clone(),
                    votes: votes.iter().map(|v| v.symbol()).collect(),
                })
                .collect(),
        }
    }

    fn from_stored(stored: StoredMatrix) -> Result<Self> {
        if stored.format_version != MATRIX_FORMAT_VERSION {
            return Err(Error::FormatVersion {
                what: "label matrix",
                found: stored.format_version,
                expected: MATRIX_FORMAT_VERSION,
            });
        }
        let mut m = Self::empty(stored.candidates, stored.n_pairs);
        for col in stored.columns {
            let votes = col
                .votes
                .chars()
                .map(|c| Vote::from_symbol(c).ok_or_else(|| Error::parse(None, format!("bad vote symbol {c:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if votes.len() != m.n_pairs {
                return Err(Error::parse(
                    None,
                    format!("column {} has {} votes, expected {}", col.lf_id, votes.len(), m.n_pairs),
                ));
            }
            if m.lf_ids.contains(&col.lf_id) {
                return Err(Error::parse(None, format!("duplicate column {}", col.lf_id)));
            }
            m.push_column(col.lf_id, col.version, votes);
        }
        Ok(m)
    }
}

const MATRIX_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredMatrix {
    format_version: u32,
    candidates: String,
    n_pairs: usize,
    columns: Vec<StoredColumn>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StoredColumn {
    lf_id: String,
    version: String,
    votes: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Truth {
    Match,
    NonMatch,
}

impl Truth {
    pub fn is_match(self) -> bool {
        self == Truth::Match
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelSource {
    Fixture,
    UserClick,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthLabel {
    pub value: Truth,
    pub source: LabelSource,
}

/// At most one label per pair; user labels take precedence over fixture
/// labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    labels: BTreeMap<PairKey, GroundTruthLabel>,
}

#[derive(Serialize, Deserialize)]
struct LabelRow {
    left_id: String,
    right_id: String,
    value: Truth,
    source: LabelSource,
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a label. A fixture label never replaces a user label.
    pub fn set(&mut self, key: PairKey, label: GroundTruthLabel) {
        if label.source == LabelSource::Fixture {
            if let Some(existing) = self.labels.get(&key) {
                if existing.source == LabelSource::UserClick {
                    return;
                }
            }
        }
        self.labels.insert(key, label);
    }

    pub fn clear(&mut self, key: &PairKey) -> Option<GroundTruthLabel> {
        self.labels.remove(key)
    }

    pub fn get(&self, key: &PairKey) -> Option<&GroundTruthLabel> {
        self.labels.get(key)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PairKey, &GroundTruthLabel)> {
        self.labels.iter()
    }

    pub fn from_source(&self, source: LabelSource) -> impl Iterator<Item = (&PairKey, Truth)> {
        self.labels
            .iter()
            .filter(move |(_, l)| l.source == source)
            .map(|(k, l)| (k, l.value))
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        for (key, label) in &self.labels {
            csv.serialize(LabelRow {
                left_id: key.left_id.clone(),
                right_id: key.right_id.clone(),
                value: label.value,
                source: label.source,
            })?;
        }
        if self.labels.is_empty() {
            csv.write_record(["left_id", "right_id", "value", "source"])?;
        }
        csv.flush().map_err(|e| Error::io("<labels>", e))?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let mut gt = Self::new();
        for row in csv.deserialize::<LabelRow>() {
            let row = row?;
            gt.set(
                PairKey::new(row.left_id, row.right_id),
                GroundTruthLabel {
                    value: row.value,
                    source: row.source,
                },
            );
        }
        Ok(gt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vote_conversions() {
        for v in Vote::ALL {
            assert_eq!(Vote::try_from(v.value()).unwrap(), v);
        }
        assert!(Vote::try_from(2).is_err());
        assert_eq!(Vote::Match.to_string(), "+1");
        assert_eq!(Vote::Unmatch.to_string(), "-1");
    }

    #[test]
    fn matrix_rows_and_bytes() {
        use Vote::*;
        let m = LabelMatrix::from_rows(&[vec![Match, Abstain], vec![Unmatch, Match]]);
        assert_eq!(m.row(1), vec![Unmatch, Match]);
        assert_eq!(m.column(0), [Match, Unmatch]);
        let back = LabelMatrix::from_bytes(&m.to_bytes()).unwrap();
        assert_eq!(back, m);
        assert!(LabelMatrix::from_bytes(b"{}").is_err());
    }

    #[test]
    fn user_labels_override_fixture() {
        let key = PairKey::new("a", "b");
        let mut gt = GroundTruth::new();
        gt.set(key.clone(), GroundTruthLabel { value: Truth::NonMatch, source: LabelSource::UserClick });
        gt.set(key.clone(), GroundTruthLabel { value: Truth::Match, source: LabelSource::Fixture });
        assert_eq!(gt.get(&key).unwrap().value, Truth::NonMatch);
        assert_eq!(gt.len(), 1);

        let mut buf = Vec::new();
        gt.write(&mut buf).unwrap();
        assert_eq!(GroundTruth::read(buf.as_slice()).unwrap(), gt);
        assert!(gt.clear(&key).is_some());
        assert!(gt.is_empty());
    }
}
