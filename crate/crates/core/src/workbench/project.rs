use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ProjectConfig;
use super::store::{read, read_optional, remove_if_exists, write_atomic, Layout};
use crate::autolf;
use crate::blocking::{block, build_signatures, smart_sample};
use crate::candidates::{pair_view, CandidatePair, CandidateSet, PairKey, PairView};
use crate::error::{Error, Result};
use crate::labelmodel::{
    estimate_em_precision, fit, fn_drilldown, fp_drilldown, lf_quality, precision_sample, LfParameters, PairGraph,
    PosteriorLabels, PrecisionEstimate, MATCH_THRESHOLD,
};
use crate::labels::{GroundTruth, GroundTruthLabel, LabelMatrix, LabelSource, Truth, Vote};
use crate::lf::{apply_all, lf_raw_stats, trace, validate, ApplyReport, CorpusCache, LabelFunctionSpec, LfTrace, Origin};
use crate::table::{ingest_table_pair, Side, TablePair};

const PROJECT_FORMAT: u32 = 1;
const MODEL_FORMAT: u32 = 1;
const SAMPLE_FORMAT: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Meta {
    format_version: u32,
    id_column: String,
}

/// Per-LF row of the LF stats panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfStats {
    pub name: String,
    pub origin: Origin,
    pub n_match: usize,
    pub n_unmatch: usize,
    pub n_abstain: usize,
    pub coverage: f64,
    pub est_fpr: f64,
    pub est_fnr: f64,
    pub alpha_match: f64,
    pub alpha_unmatch: f64,
}

/// Everything a fit produces, persisted as `model/state.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub format_version: u32,
    pub candidates_fingerprint: String,
    pub lf_ids: Vec<String>,
    pub lf_versions: Vec<String>,
    /// Digest of the user labels that were clamped during the fit.
    pub clamps_fingerprint: String,
    pub params: LfParameters,
    pub posterior: PosteriorLabels,
    pub lf_stats: Vec<LfStats>,
}

impl ModelState {
    pub fn to_bytes(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(self).expect("model state serializes")
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        #[derive(Deserialize)]
        struct Version {
            format_version: u32,
        }
        let v: Version = serde_json::from_slice(bytes).map_err(json_error)?;
        if v.format_version != MODEL_FORMAT {
            return Err(Error::FormatVersion {
                what: "model state",
                found: v.format_version,
                expected: MODEL_FORMAT,
            });
        }
        let state: Self = serde_json::from_slice(bytes).map_err(json_error)?;
        let n = state.lf_ids.len();
        if state.lf_versions.len() != n || state.params.n_lfs() != n || state.lf_stats.len() != n {
            return Err(Error::parse(None, "model state: per-LF lists disagree in length"));
        }
        if state.posterior.gamma.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return Err(Error::parse(None, "model state: posterior outside [0, 1]"));
        }
        Ok(state)
    }

    fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_bytes()))
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::parse(Some(e.line() as u64), e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StoredSample {
    format_version: u32,
    model_digest: String,
    seed: u64,
    n: usize,
    pairs: Vec<PairKey>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelStatus {
    Fit,
    NotFit,
    NoUsableLfs,
}

/// The EM stats panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmStats {
    pub left_size: usize,
    pub right_size: usize,
    pub candidate_count: usize,
    pub matches_found: usize,
    /// `None` until at least one precision-sample pair is labeled.
    pub estimated_precision: Option<PrecisionEstimate>,
    pub model_status: ModelStatus,
    /// Share of labeled matches that survived blocking; present when fixture
    /// labels were imported.
    pub blocking_recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplyOutcome {
    pub stats: EmStats,
    pub lf_stats: Vec<LfStats>,
    pub report: ApplyReport,
    /// False when the previous fit was still valid and was returned as is.
    pub refit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfEntry {
    pub name: String,
    pub origin: Origin,
    pub version: String,
    pub spec: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Smart,
    Precision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DrillKind {
    Fp,
    Fn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelAction {
    Match,
    NonMatch,
    Clear,
}

/// One pair as shown in the data viewer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub left_id: String,
    pub right_id: String,
    pub view: PairView,
    /// Blocking-time similarity hint (smart samples).
    pub likelihood: Option<f64>,
    pub gamma: Option<f64>,
    /// Vote of the drilled-down LF.
    pub vote: Option<Vote>,
    pub label: Option<Truth>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateReport {
    pub candidates: usize,
    pub auto_lfs: Vec<String>,
    pub fit: Option<ApplyOutcome>,
    /// Why the initial fit did not happen, if it did not.
    pub fit_skipped: Option<String>,
}

/// A workbench project rooted at one directory.
///
/// Mutating methods persist their effect before returning. Every write is a
/// whole-file atomic replace, so an interrupted process leaves a project that
/// reopens cleanly.
#[derive(Debug)]
pub struct Project {
    layout: Layout,
    id_column: String,
    config: ProjectConfig,
    tables: TablePair,
    candidates: CandidateSet,
    lfs: BTreeMap<String, LabelFunctionSpec>,
    matrix: Option<LabelMatrix>,
    model: Option<ModelState>,
    model_digest: Option<String>,
    ground_truth: GroundTruth,
    sample: Option<StoredSample>,
    corpus: CorpusCache,
}

impl Project {
    /// Ingests the tables, blocks, generates auto LFs, applies them and fits
    /// the model once. `matches`, if given, is a `left_id,right_id` file of
    /// known matches imported as fixture labels.
    pub fn create(
        root: impl Into<PathBuf>,
        left: &Path,
        right: &Path,
        id_column: &str,
        config: ProjectConfig,
        matches: Option<&Path>,
    ) -> Result<(Self, CreateReport)> {
        let layout = Layout::new(root);
        if layout.meta().exists() {
            return Err(Error::ProjectExists(layout.root().to_path_buf()));
        }
        config.check()?;
        let tables = ingest_table_pair(left, right, id_column)?;
        let signatures = build_signatures(&tables, &config.blocking.signature_mode()?, config.blocking.seed)?;
        let candidates = block(&signatures, config.blocking.bands, config.blocking.rows)?;

        let mut project = Self {
            layout,
            id_column: id_column.to_string(),
            config,
            tables,
            candidates,
            lfs: BTreeMap::new(),
            matrix: None,
            model: None,
            model_digest: None,
            ground_truth: GroundTruth::new(),
            sample: None,
            corpus: CorpusCache::new(),
        };
        project.write_tables()?;
        project.write_candidates()?;
        write_atomic(&project.layout.config(), project.config.to_toml().as_bytes())?;
        if let Some(path) = matches {
            project.import_matches(path)?;
        }

        let mut auto_lfs = Vec::new();
        if project.config.auto_lf.enabled {
            let generated = autolf::generate(
                &project.config.auto_lf.grid,
                project.config.auto_lf.target_precision,
                project.config.auto_lf.max_lfs,
                &project.candidates,
                &project.tables,
                &project.corpus,
            )?;
            for (spec, _) in generated {
                auto_lfs.push(spec.name.clone());
                project.upsert_lf(spec)?;
            }
        }

        let (fit, fit_skipped) = if project.lfs.is_empty() {
            (None, Some(Error::NoLfs.to_string()))
        } else {
            match project.apply_and_fit() {
                Ok(outcome) => (Some(outcome), None),
                Err(e @ Error::NoUsableLfs) => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            }
        };

        let meta = Meta {
            format_version: PROJECT_FORMAT,
            id_column: project.id_column.clone(),
        };
        write_atomic(&project.layout.meta(), &serde_json::to_vec_pretty(&meta).expect("meta serializes"))?;
        let report = CreateReport {
            candidates: project.candidates.len(),
            auto_lfs,
            fit,
            fit_skipped,
        };
        Ok((project, report))
    }

    pub fn open(root: impl Into<PathBuf>) -> Result<Self> {
        let layout = Layout::new(root);
        let meta_bytes = match read_optional(&layout.meta())? {
            Some(bytes) => bytes,
            None => return Err(Error::NoProject(layout.root().to_path_buf())),
        };
        let meta: Meta = serde_json::from_slice(&meta_bytes).map_err(json_error)?;
        if meta.format_version != PROJECT_FORMAT {
            return Err(Error::FormatVersion {
                what: "project",
                found: meta.format_version,
                expected: PROJECT_FORMAT,
            });
        }
        let config = ProjectConfig::from_path(&layout.config())?;
        let tables = ingest_table_pair(&layout.left_table(), &layout.right_table(), &meta.id_column)?;
        let candidates = CandidateSet::read(read(&layout.candidates())?.as_slice())?;
        candidates.check_integrity(&tables)?;

        let mut lfs = BTreeMap::new();
        let dir = layout.lfs_dir();
        if dir.exists() {
            let entries = std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
            for entry in entries {
                let path = entry.map_err(|e| Error::io(&dir, e))?.path();
                if path.extension().and_then(|e| e.to_str()) != Some("toml") {
                    continue;
                }
                let text = String::from_utf8(read(&path)?)
                    .map_err(|_| Error::parse(None, format!("{} is not UTF-8", path.display())))?;
                let spec = LabelFunctionSpec::from_toml(&text)?;
                if path.file_stem().and_then(|s| s.to_str()) != Some(spec.name.as_str()) {
                    return Err(Error::parse(
                        None,
                        format!("{} holds LF {:?}", path.display(), spec.name),
                    ));
                }
                lfs.insert(spec.name.clone(), spec);
            }
        }

        let matrix = read_optional(&layout.matrix())?
            .map(|b| LabelMatrix::from_bytes(&b))
            .transpose()?;
        let model = read_optional(&layout.model())?
            .map(|b| ModelState::from_bytes(&b))
            .transpose()?;
        if let Some(m) = &model {
            if m.posterior.gamma.len() != candidates.len() {
                return Err(Error::parse(None, "model state does not cover the candidate set"));
            }
        }
        let ground_truth = read_optional(&layout.ground_truth())?
            .map(|b| GroundTruth::read(b.as_slice()))
            .transpose()?
            .unwrap_or_default();
        let sample = read_optional(&layout.precision_sample())?
            .map(|b| serde_json::from_slice::<StoredSample>(&b).map_err(json_error))
            .transpose()?;
        if let Some(s) = &sample {
            if s.format_version != SAMPLE_FORMAT {
                return Err(Error::FormatVersion {
                    what: "precision sample",
                    found: s.format_version,
                    expected: SAMPLE_FORMAT,
                });
            }
        }
        let model_digest = model.as_ref().map(ModelState::digest);
        Ok(Self {
            layout,
            id_column: meta.id_column,
            config,
            tables,
            candidates,
            lfs,
            matrix,
            model,
            model_digest,
            ground_truth,
            sample,
            corpus: CorpusCache::new(),
        })
    }

    pub fn root(&self) -> &Path {
        self.layout.root()
    }

    pub fn config(&self) -> &ProjectConfig {
        &self.config
    }

    pub fn tables(&self) -> &TablePair {
        &self.tables
    }

    pub fn candidates(&self) -> &CandidateSet {
        &self.candidates
    }

    pub fn matrix(&self) -> Option<&LabelMatrix> {
        self.matrix.as_ref()
    }

    pub fn model(&self) -> Option<&ModelState> {
        self.model.as_ref()
    }

    pub fn ground_truth(&self) -> &GroundTruth {
        &self.ground_truth
    }

    fn write_tables(&self) -> Result<()> {
        for (side, path) in [(Side::Left, self.layout.left_table()), (Side::Right, self.layout.right_table())] {
            let mut buf = Vec::new();
            self.tables.write_side(side, &self.id_column, &mut buf)?;
            write_atomic(&path, &buf)?;
        }
        Ok(())
    }

    fn write_candidates(&self) -> Result<()> {
        let mut buf = Vec::new();
        self.candidates.write(&mut buf)?;
        write_atomic(&self.layout.candidates(), &buf)
    }

    fn write_ground_truth(&self) -> Result<()> {
        let mut buf = Vec::new();
        self.ground_truth.write(&mut buf)?;
        write_atomic(&self.layout.ground_truth(), &buf)
    }

    /// Imports a `left_id,right_id` file of known matches as fixture labels.
    /// Pairs need not be candidates, but their ids must resolve.
    pub fn import_matches(&mut self, path: &Path) -> Result<usize> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut csv = csv::Reader::from_reader(std::io::BufReader::new(file));
        let mut n = 0;
        for row in csv.records() {
            let row = row?;
            let (Some(left), Some(right)) = (row.get(0), row.get(1)) else {
                return Err(Error::parse(row.position().map(|p| p.line()), "expected left_id,right_id"));
            };
            if !self.tables.left().contains(left) {
                return Err(Error::DanglingId { side: "left".into(), id: left.into() });
            }
            if !self.tables.right().contains(right) {
                return Err(Error::DanglingId { side: "right".into(), id: right.into() });
            }
            self.ground_truth.set(
                PairKey::new(left, right),
                GroundTruthLabel {
                    value: Truth::Match,
                    source: LabelSource::Fixture,
                },
            );
            n += 1;
        }
        self.write_ground_truth()?;
        Ok(n)
    }

    /// LFs in matrix column order: auto LFs by number, then user LFs by name.
    pub fn ordered_specs(&self) -> Vec<&LabelFunctionSpec> {
        let mut specs: Vec<&LabelFunctionSpec> = self.lfs.values().collect();
        specs.sort_by_key(|s| lf_order_key(s));
        specs
    }

    pub fn get_lf(&self, name: &str) -> Result<&LabelFunctionSpec> {
        self.lfs.get(name).ok_or_else(|| Error::UnknownLf(name.to_string()))
    }

    pub fn list_lfs(&self) -> Vec<LfEntry> {
        self.ordered_specs().into_iter().map(entry).collect()
    }

    /// Validates and stores a spec, replacing any LF of the same name. Does
    /// not apply it.
    pub fn upsert_lf(&mut self, spec: LabelFunctionSpec) -> Result<LfEntry> {
        let diagnostics = validate(&spec, self.tables.schema());
        if !diagnostics.is_empty() {
            return Err(Error::InvalidSpec(diagnostics));
        }
        write_atomic(&self.layout.lf(&spec.name), spec.to_toml().as_bytes())?;
        let e = entry(&spec);
        self.lfs.insert(spec.name.clone(), spec);
        Ok(e)
    }

    pub fn upsert_lf_toml(&mut self, text: &str) -> Result<LfEntry> {
        self.upsert_lf(LabelFunctionSpec::from_toml(text)?)
    }

    pub fn delete_lf(&mut self, name: &str) -> Result<()> {
        if !self.lfs.contains_key(name) {
            return Err(Error::UnknownLf(name.to_string()));
        }
        remove_if_exists(&self.layout.lf(name))?;
        self.lfs.remove(name);
        Ok(())
    }

    fn clamps(&self) -> (Vec<Option<Truth>>, String) {
        let mut hasher = Sha256::new();
        let clamps = self
            .candidates
            .iter()
            .map(|p| {
                let label = self
                    .ground_truth
                    .get(&p.key())
                    .filter(|l| l.source == LabelSource::UserClick)
                    .map(|l| l.value);
                if let Some(t) = label {
                    hasher.update(format!("{}\u{1f}{}\u{1f}{}\n", p.left_id, p.right_id, t.is_match()));
                }
                label
            })
            .collect();
        (clamps, hex::encode(hasher.finalize()))
    }

    /// Applies the LFs incrementally and refits the model. When neither the
    /// LFs nor the user labels changed since the last fit, the stored fit is
    /// returned without evaluating anything.
    pub fn apply_and_fit(&mut self) -> Result<ApplyOutcome> {
        if self.lfs.is_empty() {
            return Err(Error::NoLfs);
        }
        let specs: Vec<LabelFunctionSpec> = self.ordered_specs().into_iter().cloned().collect();
        let (matrix, report) = apply_all(&specs, &self.candidates, self.matrix.as_ref(), &self.tables, &self.corpus)?;
        let (clamps, clamps_fingerprint) = self.clamps();

        if let Some(model) = &self.model {
            if model.candidates_fingerprint == matrix.candidates_fingerprint()
                && model.lf_ids == matrix.lf_ids()
                && model.lf_versions == matrix.versions()
                && model.clamps_fingerprint == clamps_fingerprint
            {
                return Ok(ApplyOutcome {
                    stats: self.stats(),
                    lf_stats: model.lf_stats.clone(),
                    report,
                    refit: false,
                });
            }
        }

        let graph = PairGraph::from_candidates(&self.candidates);
        let (posterior, params) = match fit(&matrix, &graph, &clamps, &self.config.model.fit_config()) {
            Ok(result) => result,
            Err(e) => {
                if self.model.is_none() {
                    write_atomic(&self.layout.matrix(), &matrix.to_bytes())?;
                    self.matrix = Some(matrix);
                }
                return Err(e);
            }
        };
        let quality = lf_quality(&matrix, &posterior.gamma);
        let lf_stats = lf_raw_stats(&matrix)
            .into_iter()
            .zip(quality)
            .enumerate()
            .map(|(j, (raw, q))| LfStats {
                origin: self.lfs[&raw.lf_id].origin,
                name: raw.lf_id,
                n_match: raw.n_match,
                n_unmatch: raw.n_unmatch,
                n_abstain: raw.n_abstain,
                coverage: raw.coverage,
                est_fpr: q.est_fpr,
                est_fnr: q.est_fnr,
                alpha_match: params.alpha_match(j),
                alpha_unmatch: params.alpha_unmatch(j),
            })
            .collect::<Vec<_>>();
        let model = ModelState {
            format_version: MODEL_FORMAT,
            candidates_fingerprint: matrix.candidates_fingerprint().to_string(),
            lf_ids: matrix.lf_ids().to_vec(),
            lf_versions: matrix.versions().to_vec(),
            clamps_fingerprint,
            params,
            posterior,
            lf_stats: lf_stats.clone(),
        };
        write_atomic(&self.layout.matrix(), &matrix.to_bytes())?;
        let bytes = model.to_bytes();
        write_atomic(&self.layout.model(), &bytes)?;
        self.model_digest = Some(hex::encode(Sha256::digest(&bytes)));
        self.matrix = Some(matrix);
        self.model = Some(model);
        Ok(ApplyOutcome {
            stats: self.stats(),
            lf_stats,
            report,
            refit: true,
        })
    }

    fn model_status(&self) -> ModelStatus {
        if self.model.is_some() {
            ModelStatus::Fit
        } else if self.lfs.is_empty() || self.matrix.as_ref().is_some_and(|m| !m.has_votes()) {
            ModelStatus::NoUsableLfs
        } else {
            ModelStatus::NotFit
        }
    }

    fn current_sample(&self) -> Option<&StoredSample> {
        self.sample
            .as_ref()
            .filter(|s| Some(&s.model_digest) == self.model_digest.as_ref())
    }

    pub fn stats(&self) -> EmStats {
        let estimated_precision = self.current_sample().and_then(|s| {
            let labels: Vec<Option<bool>> = s
                .pairs
                .iter()
                .map(|k| {
                    self.ground_truth
                        .get(k)
                        .filter(|l| l.source == LabelSource::UserClick)
                        .map(|l| l.value.is_match())
                })
                .collect();
            estimate_em_precision(&labels)
        });
        let has_fixture = self.ground_truth.from_source(LabelSource::Fixture).next().is_some();
        let blocking_recall = has_fixture
            .then(|| {
                let matches: Vec<&PairKey> = self
                    .ground_truth
                    .iter()
                    .filter(|(_, l)| l.value.is_match())
                    .map(|(k, _)| k)
                    .collect();
                let kept = matches.iter().filter(|k| self.candidates.position(k).is_some()).count();
                (!matches.is_empty()).then(|| kept as f64 / matches.len() as f64)
            })
            .flatten();
        EmStats {
            left_size: self.tables.left().len(),
            right_size: self.tables.right().len(),
            candidate_count: self.candidates.len(),
            matches_found: self.model.as_ref().map_or(0, |m| m.posterior.n_matches(MATCH_THRESHOLD)),
            estimated_precision,
            model_status: self.model_status(),
            blocking_recall,
        }
    }

    pub fn lf_stats(&self) -> Vec<LfStats> {
        self.model.as_ref().map(|m| m.lf_stats.clone()).unwrap_or_default()
    }

    fn record(&self, index: usize, likelihood: Option<f64>, vote: Option<Vote>) -> Result<PairRecord> {
        let pair = &self.candidates.pairs()[index];
        Ok(PairRecord {
            left_id: pair.left_id.clone(),
            right_id: pair.right_id.clone(),
            view: pair_view(pair, &self.tables)?,
            likelihood,
            gamma: self.model.as_ref().map(|m| m.posterior.gamma[index]),
            vote,
            label: self.ground_truth.get(&pair.key()).map(|l| l.value),
        })
    }

    /// Smart sample of likely missed matches, or the seeded uniform sample of
    /// predicted matches used to estimate precision. The precision sample is
    /// persisted and reused until the model or `n` changes.
    pub fn get_sample(&mut self, kind: SampleKind, n: usize) -> Result<Vec<PairRecord>> {
        let model = self.model.as_ref().ok_or(Error::NoPosterior)?;
        match kind {
            SampleKind::Smart => smart_sample(&self.candidates, Some(&model.posterior), n)?
                .into_iter()
                .map(|s| {
                    let index = self.candidates.position(&s.pair.key()).expect("sampled from candidates");
                    self.record(index, Some(s.likelihood), None)
                })
                .collect(),
            SampleKind::Precision => {
                if n == 0 {
                    return Err(Error::InvalidParameter("sample size must be at least 1".into()));
                }
                let seed = self.config.model.seed;
                let reuse = self.current_sample().is_some_and(|s| s.n == n && s.seed == seed);
                if !reuse {
                    let picked = precision_sample(&model.posterior.gamma, n, seed)?;
                    let sample = StoredSample {
                        format_version: SAMPLE_FORMAT,
                        model_digest: self.model_digest.clone().expect("digest tracks model"),
                        seed,
                        n,
                        pairs: picked.iter().map(|&i| self.candidates.pairs()[i].key()).collect(),
                    };
                    write_atomic(
                        &self.layout.precision_sample(),
                        &serde_json::to_vec_pretty(&sample).expect("sample serializes"),
                    )?;
                    self.sample = Some(sample);
                }
                let keys = self.sample.as_ref().expect("just set").pairs.clone();
                keys.iter()
                    .map(|k| {
                        let index = self.candidates.position(k).ok_or_else(|| unknown_pair(k))?;
                        self.record(index, None, None)
                    })
                    .collect()
            }
        }
    }

    /// Records or clears a user label on a candidate pair. The model picks the
    /// label up at the next fit; the precision estimate reflects it at once.
    pub fn label_pair(&mut self, left_id: &str, right_id: &str, action: LabelAction) -> Result<EmStats> {
        let key = PairKey::new(left_id, right_id);
        if self.candidates.position(&key).is_none() {
            return Err(unknown_pair(&key));
        }
        match action {
            LabelAction::Clear => {
                self.ground_truth.clear(&key);
            }
            LabelAction::Match | LabelAction::NonMatch => {
                let value = if action == LabelAction::Match { Truth::Match } else { Truth::NonMatch };
                self.ground_truth.set(
                    key,
                    GroundTruthLabel {
                        value,
                        source: LabelSource::UserClick,
                    },
                );
            }
        }
        self.write_ground_truth()?;
        Ok(self.stats())
    }

    /// Pairs where the LF disagrees with the fitted model.
    pub fn drilldown(&self, lf: &str, kind: DrillKind) -> Result<Vec<PairRecord>> {
        self.get_lf(lf)?;
        let model = self.model.as_ref().ok_or(Error::NoPosterior)?;
        let matrix = self.matrix.as_ref().ok_or(Error::NoPosterior)?;
        let j = match model.lf_ids.iter().position(|id| id == lf) {
            Some(j) if matrix.lf_index(lf) == Some(j) => j,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "LF {lf:?} is not part of the current fit; run apply first"
                )))
            }
        };
        let gamma = &model.posterior.gamma;
        let indices = match kind {
            DrillKind::Fp => fp_drilldown(matrix, j, gamma),
            DrillKind::Fn => fn_drilldown(matrix, j, gamma),
        };
        indices
            .into_iter()
            .map(|i| self.record(i, None, Some(matrix.vote(i, j))))
            .collect()
    }

    /// Dry run of one stored LF on one pair, with intermediate values.
    pub fn trace(&self, lf: &str, left_id: &str, right_id: &str) -> Result<LfTrace> {
        self.trace_spec(self.get_lf(lf)?, left_id, right_id)
    }

    pub fn trace_spec(&self, spec: &LabelFunctionSpec, left_id: &str, right_id: &str) -> Result<LfTrace> {
        let pair = CandidatePair {
            left_id: left_id.to_string(),
            right_id: right_id.to_string(),
            block_key: String::new(),
            similarity_hint: 0.0,
        };
        trace(spec, &pair, &self.tables, &self.corpus)
    }

    /// Writes predicted matches (`γ ≥ 0.5`) as `left_id,right_id,gamma`.
    pub fn export_matches<W: Write>(&self, writer: W) -> Result<usize> {
        let model = self.model.as_ref().ok_or(Error::NoPosterior)?;
        let mut csv = csv::Writer::from_writer(writer);
        csv.write_record(["left_id", "right_id", "gamma"])?;
        let mut n = 0;
        for (pair, &g) in self.candidates.iter().zip(&model.posterior.gamma) {
            if g >= MATCH_THRESHOLD {
                csv.write_record([pair.left_id.as_str(), pair.right_id.as_str(), &g.to_string()])?;
                n += 1;
            }
        }
        csv.flush().map_err(|e| Error::io("<export>", e))?;
        Ok(n)
    }

    /// Predicted match set at the 0.5 threshold.
    pub fn predicted_matches(&self) -> HashSet<PairKey> {
        match &self.model {
            Some(m) => self
                .candidates
                .iter()
                .zip(&m.posterior.gamma)
                .filter(|(_, &g)| g >= MATCH_THRESHOLD)
                .map(|(p, _)| p.key())
                .collect(),
            None => HashSet::new(),
        }
    }
}

fn unknown_pair(key: &PairKey) -> Error {
    Error::UnknownPair(key.left_id.clone(), key.right_id.clone())
}

fn entry(spec: &LabelFunctionSpec) -> LfEntry {
    LfEntry {
        name: spec.name.clone(),
        origin: spec.origin,
        version: spec.version().0,
        spec: spec.to_toml(),
    }
}

fn lf_order_key(spec: &LabelFunctionSpec) -> (bool, String, u64, String) {
    let name = &spec.name;
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    let number = name[stem.len()..].parse().unwrap_or(0);
    (spec.origin != Origin::Auto, stem.to_string(), number, name.clone())
}
