use std::collections::HashMap;

use super::signature::{SignatureSource, Signatures, TupleSignature};
use crate::candidates::{CandidatePair, CandidateSet};
use crate::error::{Error, Result};

#[derive(Debug, Default, Clone)]
struct Bucket {
    left: Vec<usize>,
    right: Vec<usize>,
}

/// Banded LSH index: `bands × rows = k`, each tuple in exactly `bands`
/// buckets (one per band).
#[derive(Debug, Clone)]
pub struct LshIndex {
    bands: usize,
    rows: usize,
    buckets: Vec<HashMap<Vec<u64>, Bucket>>,
}

impl LshIndex {
    pub fn build(signatures: &Signatures, bands: usize, rows: usize) -> Result<Self> {
        if bands == 0 || rows == 0 || bands * rows != signatures.k {
            return Err(Error::InvalidParameter(format!(
                "bands ({bands}) x rows ({rows}) must equal k ({})",
                signatures.k
            )));
        }
        let mut buckets = vec![HashMap::<Vec<u64>, Bucket>::new(); bands];
        for (pos, sig) in signatures.left.iter().enumerate() {
            for (band, map) in buckets.iter_mut().enumerate() {
                map.entry(band_values(sig, band, rows)).or_default().left.push(pos);
            }
        }
        for (pos, sig) in signatures.right.iter().enumerate() {
            for (band, map) in buckets.iter_mut().enumerate() {
                map.entry(band_values(sig, band, rows)).or_default().right.push(pos);
            }
        }
        Ok(Self { bands, rows, buckets })
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of buckets holding the tuple at `pos` on the given side.
    pub fn memberships(&self, left_side: bool, pos: usize) -> usize {
        self.buckets
            .iter()
            .flat_map(|m| m.values())
            .filter(|b| if left_side { b.left.contains(&pos) } else { b.right.contains(&pos) })
            .count()
    }

    /// Every left/right pair sharing at least one bucket. `block_key` names
    /// the lowest band in which the pair collides.
    pub fn candidates(&self, signatures: &Signatures) -> CandidateSet {
        let mut first_band: HashMap<(usize, usize), (usize, u64)> = HashMap::new();
        for (band, map) in self.buckets.iter().enumerate() {
            for (values, bucket) in map {
                if bucket.left.is_empty() || bucket.right.is_empty() {
                    continue;
                }
                let key_hash = bucket_hash(values);
                for &l in &bucket.left {
                    for &r in &bucket.right {
                        first_band
                            .entry((l, r))
                            .and_modify(|e| {
                                if band < e.0 {
                                    *e = (band, key_hash)
                                }
                            })
                            .or_insert((band, key_hash));
                    }
                }
            }
        }
        let pairs = first_band
            .into_iter()
            .map(|((l, r), (band, key_hash))| {
                let ls = &signatures.left[l];
                let rs = &signatures.right[r];
                CandidatePair {
                    left_id: ls.tuple_id.clone(),
                    right_id: rs.tuple_id.clone(),
                    block_key: format!("b{band}:{key_hash:016x}"),
                    similarity_hint: similarity_hint(ls, rs),
                }
            })
            .collect();
        CandidateSet::new(pairs)
    }
}

fn band_values(sig: &TupleSignature, band: usize, rows: usize) -> Vec<u64> {
    sig.values[band * rows..(band + 1) * rows].to_vec()
}

fn bucket_hash(values: &[u64]) -> u64 {
    values.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &v| {
        (h ^ v).wrapping_mul(0x0100_0000_01b3).rotate_left(17)
    })
}

/// Fraction of equal minhash coordinates, or the cosine of the embeddings
/// clamped to `[0, 1]`.
pub fn similarity_hint(a: &TupleSignature, b: &TupleSignature) -> f64 {
    match (a.source, &a.embedding, &b.embedding) {
        (SignatureSource::ImportedEmbedding, Some(x), Some(y)) => {
            let dot: f64 = x.iter().zip(y).map(|(p, q)| p * q).sum();
            let nx = x.iter().map(|p| p * p).sum::<f64>().sqrt();
            let ny = y.iter().map(|q| q * q).sum::<f64>().sqrt();
            if nx == 0.0 || ny == 0.0 {
                0.0
            } else {
                (dot / (nx * ny)).clamp(0.0, 1.0)
            }
        }
        _ => {
            let k = a.values.len().max(1);
            a.values.iter().zip(&b.values).filter(|(x, y)| x == y).count() as f64 / k as f64
        }
    }
}

/// Builds the index and returns the candidate set.
pub fn block(signatures: &Signatures, bands: usize, rows: usize) -> Result<CandidateSet> {
    Ok(LshIndex::build(signatures, bands, rows)?.candidates(signatures))
}

/// Probability that a pair with coordinate-collision probability `s` shares
/// at least one band.
pub fn banding_collision_probability(s: f64, bands: usize, rows: usize) -> f64 {
    1.0 - (1.0 - s.powi(rows as i32)).powi(bands as i32)
}
