use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Writes `bytes` to `path` by way of a temporary file in the same directory
/// and a rename, so readers see either the old or the new content.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn read_optional(path: &Path) -> Result<Option<Vec<u8>>> {
    match std::fs::read(path) {
        Ok(bytes) => Ok(Some(bytes)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(path, e)),
    }
}

pub fn remove_if_exists(path: &Path) -> Result<()> {
    match std::fs::remove_file(path) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(Error::io(path, e)),
    }
}

/// File locations inside a project directory.
#[derive(Debug, Clone)]
pub struct Layout {
    root: PathBuf,
}

impl Layout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn meta(&self) -> PathBuf {
        self.root.join("project.json")
    }

    pub fn config(&self) -> PathBuf {
        self.root.join("config.toml")
    }

    pub fn left_table(&self) -> PathBuf {
        self.root.join("tables").join("left.csv")
    }

    pub fn right_table(&self) -> PathBuf {
        self.root.join("tables").join("right.csv")
    }

    pub fn candidates(&self) -> PathBuf {
        self.root.join("candidates").join("candidates.csv")
    }

    pub fn lfs_dir(&self) -> PathBuf {
        self.root.join("lfs")
    }

    pub fn lf(&self, name: &str) -> PathBuf {
        self.lfs_dir().join(format!("{name}.toml"))
    }

    pub fn matrix(&self) -> PathBuf {
        self.root.join("labels").join("matrix.json")
    }

    pub fn ground_truth(&self) -> PathBuf {
        self.root.join("labels").join("ground_truth.csv")
    }

    pub fn precision_sample(&self) -> PathBuf {
        self.root.join("labels").join("precision_sample.json")
    }

    pub fn model(&self) -> PathBuf {
        self.root.join("model").join("state.json")
    }
}
