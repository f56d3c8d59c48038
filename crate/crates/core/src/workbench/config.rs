use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::autolf::AutoLfGrid;
use crate::blocking::SignatureMode;
use crate::error::{Error, Result};
use crate::labelmodel::FitConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignatureKind {
    BuiltinMinhash,
    ImportedEmbedding,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockingConfig {
    pub mode: SignatureKind,
    /// Signature length; must equal `bands * rows`.
    pub k: usize,
    pub bands: usize,
    pub rows: usize,
    pub seed: u64,
    /// Embedding files for `imported-embedding` mode, relative to the
    /// working directory at project creation.
    pub left_embeddings: Option<PathBuf>,
    pub right_embeddings: Option<PathBuf>,
}

impl Default for BlockingConfig {
    fn default() -> Self {
        Self {
            mode: SignatureKind::BuiltinMinhash,
            k: 256,
            bands: 128,
            rows: 2,
            seed: 42,
            left_embeddings: None,
            right_embeddings: None,
        }
    }
}

impl BlockingConfig {
    pub fn signature_mode(&self) -> Result<SignatureMode> {
        match self.mode {
            SignatureKind::BuiltinMinhash => Ok(SignatureMode::BuiltinMinhash { k: self.k }),
            SignatureKind::ImportedEmbedding => match (&self.left_embeddings, &self.right_embeddings) {
                (Some(left), Some(right)) => Ok(SignatureMode::ImportedEmbedding {
                    k: self.k,
                    left: left.clone(),
                    right: right.clone(),
                }),
                _ => Err(Error::InvalidParameter(
                    "imported-embedding mode needs left_embeddings and right_embeddings".into(),
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AutoLfConfig {
    pub enabled: bool,
    pub target_precision: f64,
    pub max_lfs: usize,
    pub grid: AutoLfGrid,
}

impl Default for AutoLfConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            target_precision: 0.9,
            max_lfs: 5,
            grid: AutoLfGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub max_iter: usize,
    pub tol: f64,
    pub transitivity: bool,
    /// Seed for the precision sample.
    pub seed: u64,
    pub precision_sample_size: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let fit = FitConfig::default();
        Self {
            max_iter: fit.max_iter,
            tol: fit.tol,
            transitivity: fit.transitivity,
            seed: 7,
            precision_sample_size: 10,
        }
    }
}

impl ModelConfig {
    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            max_iter: self.max_iter,
            tol: self.tol,
            transitivity: self.transitivity,
        }
    }
}

/// Everything in `config.toml`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProjectConfig {
    pub blocking: BlockingConfig,
    pub auto_lf: AutoLfConfig,
    pub model: ModelConfig,
}

impl ProjectConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| {
            let line = e.span().map(|span| text[..span.start.min(text.len())].lines().count().max(1) as u64);
            Error::parse(line, e.message().to_string())
        })?;
        config.check()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn check(&self) -> Result<()> {
        let b = &self.blocking;
        if b.k == 0 || b.bands == 0 || b.rows == 0 || b.bands * b.rows != b.k {
            return Err(Error::InvalidParameter(format!(
                "blocking needs k = bands * rows > 0 (got k={}, bands={}, rows={})",
                b.k, b.bands, b.rows
            )));
        }
        let a = &self.auto_lf;
        if !(a.target_precision > 0.0 && a.target_precision <= 1.0) {
            return Err(Error::InvalidParameter("auto_lf.target_precision must be in (0, 1]".into()));
        }
        if a.max_lfs == 0 {
            return Err(Error::InvalidParameter("auto_lf.max_lfs must be at least 1".into()));
        }
        if a.grid.thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(Error::InvalidParameter("auto_lf.grid.thresholds must lie in [0, 1]".into()));
        }
        if !(a.grid.novelty >= 0.0 && a.grid.novelty <= 1.0) {
            return Err(Error::InvalidParameter("auto_lf.grid.novelty must be in [0, 1]".into()));
        }
        let m = &self.model;
        if m.max_iter == 0 || m.tol.is_nan() || m.tol < 0.0 || m.precision_sample_size == 0 {
            return Err(Error::InvalidParameter(
                "model needs max_iter >= 1, tol >= 0 and precision_sample_size >= 1".into(),
            ));
        }
        Ok(())
    }
}
