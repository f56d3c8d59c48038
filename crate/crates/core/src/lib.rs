//! Weakly supervised entity matching.
//!
//! Users describe labeling functions (LFs) declaratively; the library blocks
//! two tables into candidate pairs with LSH, generates LFs automatically,
//! applies LFs incrementally into a label matrix, and combines the votes with
//! a class-conditional generative label model fitted by EM under
//! transitivity constraints. [`workbench::Project`] ties the pieces into a
//! persisted, interactive authoring loop.

pub mod blocking;
pub mod autolf;
pub mod candidates;
pub mod error;
pub mod labelmodel;
pub mod labels;
pub mod lf;
pub mod table;
pub mod text;
pub mod workbench;

pub use candidates::{pair_view, CandidatePair, CandidateSet, PairKey, PairView};
pub use error::{Error, Result};
pub use labels::{GroundTruth, GroundTruthLabel, LabelMatrix, LabelSource, Truth, Vote};
pub use table::{ingest_table_pair, RawTable, Side, TablePair, Tuple};
