//! Candidate tuple pairs produced by blocking, and the side-by-side view of a
//! pair used by the data viewer.

use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{Side, TablePair};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairKey {
    pub left_id: String,
    pub right_id: String,
}

impl PairKey {
    pub fn new(left_id: impl Into<String>, right_id: impl Into<String>) -> Self {
        Self {
            left_id: left_id.into(),
            right_id: right_id.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub left_id: String,
    pub right_id: String,
    /// LSH block that first produced the pair.
    pub block_key: String,
    /// Blocking-time similarity in `[0, 1]`.
    pub similarity_hint: f64,
}

impl CandidatePair {
    pub fn key(&self) -> PairKey {
        PairKey::new(self.left_id.clone(), self.right_id.clone())
    }
}

/// Candidate pairs sorted by `(left_id, right_id)`, unique on that key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateSet {
    pairs: Vec<CandidatePair>,
    index: HashMap<PairKey, usize>,
}

impl CandidateSet {
    /// Sorts and deduplicates; the first occurrence of a key wins.
    pub fn new(mut pairs: Vec<CandidatePair>) -> Self {
        pairs.sort_by(|a, b| (&a.left_id, &a.right_id).cmp(&(&b.left_id, &b.right_id)));
        pairs.dedup_by(|b, a| a.left_id == b.left_id && a.right_id == b.right_id);
        let index = pairs.iter().enumerate().map(|(i, p)| (p.key(), i)).collect();
        Self { pairs, index }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[CandidatePair] {
        &self.pairs
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CandidatePair> {
        self.pairs.iter()
    }

    pub fn position(&self, key: &PairKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn get(&self, key: &PairKey) -> Option<&CandidatePair> {
        self.position(key).map(|i| &self.pairs[i])
    }

    /// Checks that every id resolves in its table.
    pub fn check_integrity(&self, tables: &TablePair) -> Result<()> {
        for pair in &self.pairs {
            resolve(tables, pair)?;
        }
        Ok(())
    }

    /// Order-sensitive content fingerprint, used to key cached label matrices.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for p in &self.pairs {
            hasher.update(p.left_id.as_bytes());
            hasher.update([0u8]);
            hasher.update(p.right_id.as_bytes());
            hasher.update([1u8]);
        }
        hex::encode(hasher.finalize())
    }

    pub fn write<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["left_id", "right_id", "block_key", "similarity_hint"])?;
        for p in &self.pairs {
            csv.write_record([
                p.left_id.as_str(),
                p.right_id.as_str(),
                p.block_key.as_str(),
                &p.similarity_hint.to_string(),
            ])?;
        }
        csv.flush().map_err(|e| Error::io("<candidates>", e))?;
        Ok(())
    }

    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let mut pairs = Vec::new();
        for row in csv.deserialize::<CandidatePair>() {
            let pair = row?;
            if !(0.0..=1.0).contains(&pair.similarity_hint) {
                return Err(Error::parse(None, format!("similarity_hint {} outside [0, 1]", pair.similarity_hint)));
            }
            pairs.push(pair);
        }
        let set = Self::new(pairs);
        Ok(set)
    }
}

impl<'a> IntoIterator for &'a CandidateSet {
    type Item = &'a CandidatePair;
    type IntoIter = std::slice::Iter<'a, CandidatePair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

fn resolve<'t>(
    tables: &'t TablePair,
    pair: &CandidatePair,
) -> Result<(&'t crate::table::Tuple, &'t crate::table::Tuple)> {
    let left = tables.left().get(&pair.left_id).ok_or_else(|| Error::DanglingId {
        side: Side::Left.to_string(),
        id: pair.left_id.clone(),
    })?;
    let right = tables.right().get(&pair.right_id).ok_or_else(|| Error::DanglingId {
        side: Side::Right.to_string(),
        id: pair.right_id.clone(),
    })?;
    Ok((left, right))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub side: Side,
    pub id: String,
    pub values: Vec<String>,
}

/// Two tuples juxtaposed in schema order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairView {
    pub schema: Vec<String>,
    pub left: PairRow,
    pub right: PairRow,
}

pub fn pair_view(pair: &CandidatePair, tables: &TablePair) -> Result<PairView> {
    let (left, right) = resolve(tables, pair)?;
    Ok(PairView {
        schema: tables.schema().to_vec(),
        left: PairRow {
            side: Side::Left,
            id: left.id.clone(),
            values: left.values.clone(),
        },
        right: PairRow {
            side: Side::Right,
            id: right.id.clone(),
            values: right.values.clone(),
        },
    })
}
