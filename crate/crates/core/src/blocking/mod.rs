//! Candidate generation by banded LSH over per-tuple signatures, and the
//! smart sampler that surfaces likely matches the model currently misses.
//!
//! Signatures default to seeded minhash over each tuple's lowercased
//! whitespace tokens. Externally computed embeddings can be imported instead,
//! in which case random-hyperplane bits play the role of the hash values.

mod lsh;
mod sample;
mod signature;

pub use lsh::{banding_collision_probability, block, similarity_hint, LshIndex};
pub use sample::{smart_sample, SampledPair};
pub use signature::{
    build_signatures, read_embeddings, tuple_tokens, Hyperplanes, MinHasher, SignatureMode, SignatureSource,
    Signatures, TupleSignature,
};
