//! Project lifecycle and persistence for the interactive matching loop.
//!
//! A project directory holds:
//!
//! ```text
//! project.json              format version, id column
//! config.toml               blocking, auto-LF and model settings
//! tables/{left,right}.csv   aligned input tables
//! candidates/candidates.csv blocked pairs
//! lfs/<name>.toml           one LF spec per file
//! labels/matrix.json        LF votes with per-LF versions
//! labels/ground_truth.csv   user and fixture labels
//! labels/precision_sample.json
//! model/state.json          parameters, posterior and LF stats of the last fit
//! ```

mod config;
mod project;
mod store;

pub use config::{AutoLfConfig, BlockingConfig, ModelConfig, ProjectConfig, SignatureKind};
pub use project::{
    ApplyOutcome, CreateReport, DrillKind, EmStats, LabelAction, LfEntry, LfStats, ModelState, ModelStatus, PairRecord,
    Project, SampleKind,
};
pub use store::{write_atomic, Layout};
