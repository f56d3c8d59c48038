use std::path::PathBuf;

use thiserror::Error;

use crate::lf::Diagnostic;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<u64>, message: String },

    #[error("duplicate id {id:?} in {table} table")]
    DuplicateId { table: String, id: String },

    #[error("id column {column:?} missing from {table} table")]
    MissingIdColumn { table: String, column: String },

    #[error("{0} table is empty")]
    EmptyTable(String),

    #[error("dangling tuple id {id:?} on {side} side")]
    DanglingId { side: String, id: String },

    #[error("unknown candidate pair ({0}, {1})")]
    UnknownPair(String, String),

    #[error("operand kind mismatch: {0}")]
    OperandMismatch(&'static str),

    #[error("tf-idf weighting requires corpus statistics")]
    MissingCorpusStats,

    #[error("invalid labeling function spec:\n{}", format_diagnostics(.0))]
    InvalidSpec(Vec<Diagnostic>),

    #[error("unknown labeling function {0:?}")]
    UnknownLf(String),

    #[error("embedding import: {0}")]
    Embedding(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no labeling functions defined")]
    NoLfs,

    #[error("no usable LFs: every labeling function abstains on every pair")]
    NoUsableLfs,

    #[error("no posterior available; run the labeling model first")]
    NoPosterior,

    #[error("the labeling model predicts no matches")]
    NoPredictedMatches,

    #[error("unsupported {what} format version {found} (expected {expected})")]
    FormatVersion {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("project not found at {0}")]
    NoProject(PathBuf),

    #[error("project already exists at {0}")]
    ProjectExists(PathBuf),
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn parse(line: Option<u64>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line());
        let message = match err.kind() {
            csv::ErrorKind::UnequalLengths {
                expected_len, len, ..
            } => format!("row has {len} fields, expected {expected_len}"),
            _ => err.to_string(),
        };
        Error::Parse { line, message }
    }
}
