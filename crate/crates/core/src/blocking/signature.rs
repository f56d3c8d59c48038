use std::collections::{BTreeSet, HashMap};
use std::io::Read;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{Side, TablePair, Tuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignatureSource {
    BuiltinMinhash,
    ImportedEmbedding,
}

/// Per-tuple LSH signature: `k` minhash values, or `k` random-hyperplane
/// sign bits (stored as 0/1) plus the raw embedding in import mode.
#[derive(Debug, Clone, PartialEq)]
pub struct TupleSignature {
    pub tuple_id: String,
    pub side: Side,
    pub source: SignatureSource,
    pub values: Vec<u64>,
    pub embedding: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SignatureMode {
    BuiltinMinhash {
        k: usize,
    },
    /// Externally computed embeddings, one file per table; `k` hyperplanes.
    ImportedEmbedding {
        k: usize,
        left: PathBuf,
        right: PathBuf,
    },
}

impl SignatureMode {
    pub fn k(&self) -> usize {
        match self {
            SignatureMode::BuiltinMinhash { k } | SignatureMode::ImportedEmbedding { k, .. } => *k,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signatures {
    pub k: usize,
    pub left: Vec<TupleSignature>,
    pub right: Vec<TupleSignature>,
}

/// Lowercased whitespace tokens of all attributes.
pub fn tuple_tokens(tuple: &Tuple) -> BTreeSet<String> {
    tuple
        .values
        .iter()
        .flat_map(|v| v.split_whitespace())
        .map(str::to_lowercase)
        .collect()
}

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// `k` seeded hash functions over tokens. Stable across runs and platforms.
#[derive(Debug, Clone)]
pub struct MinHasher {
    seeds: Vec<u64>,
}

impl MinHasher {
    pub fn new(k: usize, seed: u64) -> Self {
        let mut state = splitmix64(seed);
        let seeds = (0..k)
            .map(|_| {
                state = splitmix64(state);
                state
            })
            .collect();
        Self { seeds }
    }

    pub fn k(&self) -> usize {
        self.seeds.len()
    }

    /// Minimum of each hash function over `tokens`; all `u64::MAX` for an
    /// empty set.
    pub fn signature<'a, I>(&self, tokens: I) -> Vec<u64>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut mins = vec![u64::MAX; self.seeds.len()];
        for token in tokens {
            let base = splitmix64(fnv1a(token.as_bytes()));
            for (min, &seed) in mins.iter_mut().zip(&self.seeds) {
                let h = splitmix64(base ^ seed);
                if h < *min {
                    *min = h;
                }
            }
        }
        mins
    }
}

/// Reads `id,x1,x2,...` rows without a header.
pub fn read_embeddings<R: Read>(reader: R) -> Result<Vec<(String, Vec<f64>)>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows = Vec::new();
    let mut dim = None;
    for record in csv.records() {
        let record = record?;
        let line = record.position().map(|p| p.line());
        let mut fields = record.iter();
        let id = fields.next().unwrap_or_default().to_string();
        let vector = fields
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(line, format!("not a finite number: {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if vector.is_empty() {
            return Err(Error::parse(line, "embedding row has no components"));
        }
        match dim {
            None => dim = Some(vector.len()),
            Some(d) if d != vector.len() => {
                return Err(Error::Embedding(format!(
                    "dimension mismatch for {id:?}: {} components, expected {d}",
                    vector.len()
                )))
            }
            _ => {}
        }
        rows.push((id, vector));
    }
    Ok(rows)
}

fn load_embeddings(path: &std::path::Path) -> Result<HashMap<String, Vec<f64>>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let rows = read_embeddings(std::io::BufReader::new(file))?;
    let mut map = HashMap::with_capacity(rows.len());
    for (id, v) in rows {
        if map.insert(id.clone(), v).is_some() {
            return Err(Error::Embedding(format!("duplicate id {id:?} in {}", path.display())));
        }
    }
    Ok(map)
}

/// Random Gaussian hyperplanes for sign-bit signatures.
#[derive(Debug, Clone)]
pub struct Hyperplanes {
    planes: Vec<Vec<f64>>,
}

impl Hyperplanes {
    pub fn new(k: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let planes = (0..k)
            .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        Self { planes }
    }

    pub fn signature(&self, v: &[f64]) -> Vec<u64> {
        self.planes
            .iter()
            .map(|p| u64::from(p.iter().zip(v).map(|(a, b)| a * b).sum::<f64>() >= 0.0))
            .collect()
    }
}

pub fn build_signatures(tables: &TablePair, mode: &SignatureMode, seed: u64) -> Result<Signatures> {
    let k = mode.k();
    if k == 0 {
        return Err(Error::InvalidParameter("signature length k must be positive".into()));
    }
    match mode {
        SignatureMode::BuiltinMinhash { .. } => {
            let hasher = MinHasher::new(k, seed);
            let sign = |side: Side| -> Vec<TupleSignature> {
                tables
                    .table(side)
                    .tuples()
                    .par_iter()
                    .map(|t| {
                        let tokens = tuple_tokens(t);
                        TupleSignature {
                            tuple_id: t.id.clone(),
                            side,
                            source: SignatureSource::BuiltinMinhash,
                            values: hasher.signature(tokens.iter().map(String::as_str)),
                            embedding: None,
                        }
                    })
                    .collect()
            };
            Ok(Signatures {
                k,
                left: sign(Side::Left),
                right: sign(Side::Right),
            })
        }
        SignatureMode::ImportedEmbedding { left, right, .. } => {
            let left_vecs = load_embeddings(left)?;
            let right_vecs = load_embeddings(right)?;
            let dim = left_vecs.values().chain(right_vecs.values()).map(Vec::len).next().unwrap_or(0);
            if let Some(v) = left_vecs.values().chain(right_vecs.values()).find(|v| v.len() != dim) {
                return Err(Error::Embedding(format!(
                    "dimension mismatch between files: {} vs {dim}",
                    v.len()
                )));
            }
            let planes = Hyperplanes::new(k, dim, seed);
            let sign = |side: Side, vecs: &HashMap<String, Vec<f64>>| -> Result<Vec<TupleSignature>> {
                tables
                    .table(side)
                    .tuples()
                    .iter()
                    .map(|t| {
                        let v = vecs.get(&t.id).ok_or_else(|| {
                            Error::Embedding(format!("no embedding for {side} tuple {:?}", t.id))
                        })?;
                        Ok(TupleSignature {
                            tuple_id: t.id.clone(),
                            side,
                            source: SignatureSource::ImportedEmbedding,
                            values: planes.signature(v),
                            embedding: Some(v.clone()),
                        })
                    })
                    .collect()
            };
            Ok(Signatures {
                k,
                left: sign(Side::Left, &left_vecs)?,
                right: sign(Side::Right, &right_vecs)?,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_token_sets_identical_signatures() {
        let h = MinHasher::new(64, 7);
        let a = h.signature(["sony", "bravia", "40"]);
        let b = h.signature(["40", "bravia", "sony", "sony"]);
        assert_eq!(a, b);
        assert_eq!(MinHasher::new(64, 7).signature(["x"]), h.signature(["x"]));
    }

    #[test]
    fn disjoint_sets_rarely_collide() {
        let h = MinHasher::new(512, 1);
        let a: Vec<String> = (0..50).map(|i| format!("a{i}")).collect();
        let b: Vec<String> = (0..50).map(|i| format!("b{i}")).collect();
        let sa = h.signature(a.iter().map(String::as_str));
        let sb = h.signature(b.iter().map(String::as_str));
        let equal = sa.iter().zip(&sb).filter(|(x, y)| x == y).count();
        assert!(equal as f64 / 512.0 < 0.01, "{equal}");
    }

    #[test]
    fn embedding_rows() {
        let rows = read_embeddings("a,1,2\nb,0.5,-1\n".as_bytes()).unwrap();
        assert_eq!(rows[1], ("b".to_string(), vec![0.5, -1.0]));
        assert!(matches!(read_embeddings("a,1,2\nb,1\n".as_bytes()), Err(Error::Embedding(_))));
        assert!(read_embeddings("a,1,x\n".as_bytes()).is_err());
        assert!(read_embeddings("a\n".as_bytes()).is_err());
    }

    #[test]
    fn hyperplane_bits_are_deterministic() {
        let p = Hyperplanes::new(16, 3, 5);
        let v = [0.3, -0.2, 0.9];
        assert_eq!(p.signature(&v), Hyperplanes::new(16, 3, 5).signature(&v));
        assert!(p.signature(&v).iter().all(|&b| b <= 1));
        // a vector and its positive multiple share every bit
        assert_eq!(p.signature(&v), p.signature(&[0.6, -0.4, 1.8]));
    }
}
