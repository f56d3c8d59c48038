//! Declarative labeling functions: the spec format, validation, evaluation
//! over candidate pairs, and incremental application into a label matrix.
//!
//! Two spec shapes exist. A similarity LF pipes the concatenated attribute
//! text of both tuples through a [`PipelineConfig`](crate::text::PipelineConfig)
//! and thresholds the similarity. A rule LF extracts one value per side with a
//! regular expression and compares them.

mod apply;
mod eval;
mod spec;
mod validate;

pub use apply::{apply_all, lf_raw_stats, ApplyReport, LfRawStats};
pub use eval::{evaluate, trace, CompiledLf, CorpusCache, LfTrace};
pub use spec::{Comparator, Extraction, LabelFunctionSpec, LfBody, LfVersion, Origin, RuleLf, SimilarityLf};
pub use validate::{valid_name, validate, Diagnostic};
