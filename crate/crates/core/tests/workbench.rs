mod common;

use std::path::Path;

use common::fixture_dir;
use matchwork_core::lf::LabelFunctionSpec;
use matchwork_core::text::{Distance, PipelineConfig, Preprocess, Tokenizer, Weighting};
use matchwork_core::workbench::{
    write_atomic, DrillKind, LabelAction, ModelStatus, Project, ProjectConfig, SampleKind,
};
use matchwork_core::Error;

fn create(root: &Path, config: ProjectConfig, with_matches: bool) -> Project {
    let dir = fixture_dir();
    let matches = dir.join("matches.csv");
    let (project, _) = Project::create(
        root,
        &dir.join("left.csv"),
        &dir.join("right.csv"),
        "id",
        config,
        with_matches.then_some(matches.as_path()),
    )
    .unwrap();
    project
}

fn name_overlap(threshold: f64) -> LabelFunctionSpec {
    LabelFunctionSpec::similarity(
        "name_overlap",
        &["name"],
        PipelineConfig::new(vec![Preprocess::Lowercase], Tokenizer::Whitespace, Weighting::Uniform, Distance::Jaccard),
        Some(threshold),
        Some(0.1),
    )
}

/// Every persisted file, by relative path.
fn snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn reopened_project_has_identical_state() {
    let dir = tempfile::tempdir().unwrap();
    let project = create(dir.path(), ProjectConfig::default(), true);
    assert_eq!(project.stats().model_status, ModelStatus::Fit);
    assert!(project.stats().blocking_recall.unwrap() > 0.9);

    let mut reopened = Project::open(dir.path()).unwrap();
    assert_eq!(reopened.tables(), project.tables());
    assert_eq!(reopened.candidates(), project.candidates());
    assert_eq!(reopened.list_lfs(), project.list_lfs());
    assert_eq!(reopened.matrix(), project.matrix());
    assert_eq!(reopened.model(), project.model());
    assert_eq!(reopened.ground_truth(), project.ground_truth());
    assert_eq!(reopened.stats(), project.stats());

    // nothing changed, so nothing is evaluated or refit
    let outcome = reopened.apply_and_fit().unwrap();
    assert_eq!(outcome.report.evaluations, 0);
    assert!(!outcome.refit);
}

#[test]
fn creation_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    create(a.path(), ProjectConfig::default(), false);
    create(b.path(), ProjectConfig::default(), false);
    assert_eq!(snapshot(a.path()), snapshot(b.path()));
}

#[test]
fn lf_edits_recompute_only_what_changed() {
    let dir = tempfile::tempdir().unwrap();
    let mut project = create(dir.path(), ProjectConfig::default(), false);
    let n_auto = project.list_lfs().len();
    let n = project.candidates().len();

    project.upsert_lf(name_overlap(0.6)).unwrap();
    let outcome = project.apply_and_fit().unwrap();
    assert_eq!(outcome.report.recomputed, ["name_overlap"]);
    assert_eq!(outcome.report.evaluations, n);
    assert_eq!(project.matrix().unwrap().lf_ids().len(), n_auto + 1);
    assert_eq!(project.matrix().unwrap().lf_ids().last().unwrap(), "name_overlap");

    project.upsert_lf(name_overlap(0.7)).unwrap();
    assert_eq!(project.apply_and_fit().unwrap().report.recomputed, ["name_overlap"]);

    project.delete_lf("name_overlap").unwrap();
    let outcome = project.apply_and_fit().unwrap();
    assert_eq!(outcome.report.evaluations, 0);
    assert_eq!(outcome.report.dropped, ["name_overlap"]);
    assert!(outcome.refit);
    assert_eq!(project.matrix().unwrap().lf_ids().len(), n_auto);
    assert!(!dir.path().join("lfs/name_overlap.toml").exists());
    assert!(matches!(project.delete_lf("name_overlap"), Err(Error::UnknownLf(_))));
}

#[test]
fn invalid_upsert_leaves_the_store_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let mut project = create(dir.path(), ProjectConfig::default(), false);
    let before = snapshot(dir.path());
    let mut bad = name_overlap(0.6);
    bad.as_similarity_mut().unwrap().attrs = vec!["colour".into()];
    assert!(matches!(project.upsert_lf(bad), Err(Error::InvalidSpec(_))));
    assert!(project.upsert_lf_toml("name = \"x\"\norigin = \"user\"\n").is_err());
    assert_eq!(snapshot(dir.path()), before);
    assert!(project.get_lf("name_overlap").is_err());
}

#[test]
fn labels_drive_the_precision_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let mut project = create(dir.path(), ProjectConfig::default(), false);
    assert!(project.stats().estimated_precision.is_none());
    let sample = project.get_sample(SampleKind::Precision, 10).unwrap();
    assert_eq!(sample.len(), 10);
    assert!(sample.iter().all(|r| r.gamma.unwrap() >= 0.5));
    assert_eq!(project.get_sample(SampleKind::Precision, 10).unwrap(), sample);

    for (i, record) in sample.iter().enumerate() {
        let action = if i < 7 { LabelAction::Match } else { LabelAction::NonMatch };
        project.label_pair(&record.left_id, &record.right_id, action).unwrap();
    }
    let estimate = project.stats().estimated_precision.unwrap();
    assert_eq!((estimate.precision, estimate.n_labeled), (0.7, 10));

    project.label_pair(&sample[9].left_id, &sample[9].right_id, LabelAction::Clear).unwrap();
    assert_eq!(project.stats().estimated_precision.unwrap().n_labeled, 9);
    assert!(matches!(project.label_pair("nope", "nope", LabelAction::Match), Err(Error::UnknownPair(..))));

    // labels survive a reopen and are clamped by the next fit
    let mut reopened = Project::open(dir.path()).unwrap();
    assert_eq!(reopened.ground_truth(), project.ground_truth());
    assert!(reopened.apply_and_fit().unwrap().refit);
    let gamma = &reopened.model().unwrap().posterior.gamma;
    for record in &sample[7..9] {
        let i = reopened.candidates().iter().position(|p| p.left_id == record.left_id && p.right_id == record.right_id);
        assert_eq!(gamma[i.unwrap()], 0.0);
    }
    // a refit invalidates the old precision sample
    assert!(reopened.stats().estimated_precision.is_none());
}

#[test]
fn smart_sample_and_drilldown_agree_with_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let project = &mut create(dir.path(), ProjectConfig::default(), false);
    let smart = project.get_sample(SampleKind::Smart, 20).unwrap();
    assert!(!smart.is_empty());
    assert!(smart.iter().all(|r| r.gamma.unwrap() < 0.5));
    assert!(smart.windows(2).all(|w| w[0].likelihood >= w[1].likelihood));

    let name = project.list_lfs()[0].name.clone();
    for record in project.drilldown(&name, DrillKind::Fp).unwrap() {
        assert!(record.gamma.unwrap() < 0.5);
        assert_eq!(record.vote, Some(matchwork_core::Vote::Match));
    }
    assert!(matches!(project.drilldown("missing", DrillKind::Fn), Err(Error::UnknownLf(_))));

    let mut out = Vec::new();
    let n = project.export_matches(&mut out).unwrap();
    assert_eq!(n, project.predicted_matches().len());
    assert_eq!(String::from_utf8(out).unwrap().lines().count(), n + 1);
}

#[test]
fn interrupted_writes_leave_a_loadable_project() {
    let dir = tempfile::tempdir().unwrap();
    let mut project = create(dir.path(), ProjectConfig::default(), false);
    project.upsert_lf(name_overlap(0.6)).unwrap();

    // a crash between the matrix and model writes: the stale model is simply
    // refit on the next apply
    let model = dir.path().join("model/state.json");
    let stale = std::fs::read(&model).unwrap();
    project.apply_and_fit().unwrap();
    std::fs::write(&model, &stale).unwrap();
    // an abandoned temp file from a killed write
    std::fs::write(dir.path().join("labels/.tmpXYZ"), b"{ half a fi").unwrap();

    let mut reopened = Project::open(dir.path()).unwrap();
    let outcome = reopened.apply_and_fit().unwrap();
    assert!(outcome.refit);
    assert_eq!(outcome.report.evaluations, 0);
    assert_eq!(reopened.model(), project.model());

    // a torn file would be rejected, never half-read
    std::fs::write(&model, &stale[..stale.len() / 2]).unwrap();
    assert!(Project::open(dir.path()).is_err());
}

#[test]
fn atomic_write_replaces_whole_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sub/file.txt");
    write_atomic(&path, b"first version, longer").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"second");
    assert_eq!(std::fs::read_dir(dir.path().join("sub")).unwrap().count(), 1);
}

#[test]
fn unusable_lf_sets_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = ProjectConfig::default();
    config.auto_lf.enabled = false;
    let mut project = create(dir.path(), config, false);
    assert_eq!(project.stats().model_status, ModelStatus::NoUsableLfs);
    assert!(matches!(project.apply_and_fit(), Err(Error::NoLfs)));
    assert!(matches!(project.get_sample(SampleKind::Smart, 5), Err(Error::NoPosterior)));

    let strict = tempfile::tempdir().unwrap();
    let mut config = ProjectConfig::default();
    config.auto_lf.target_precision = 1.0;
    config.auto_lf.grid.thresholds = vec![0.0];
    let dir2 = fixture_dir();
    let (project, report) =
        Project::create(strict.path(), &dir2.join("left.csv"), &dir2.join("right.csv"), "id", config, None).unwrap();
    assert!(report.auto_lfs.is_empty());
    assert!(report.fit_skipped.is_some());
    assert_eq!(project.stats().model_status, ModelStatus::NoUsableLfs);
}

#[test]
fn existing_projects_are_not_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    create(dir.path(), ProjectConfig::default(), false);
    let fixtures = fixture_dir();
    let again = Project::create(
        dir.path(),
        &fixtures.join("left.csv"),
        &fixtures.join("right.csv"),
        "id",
        ProjectConfig::default(),
        None,
    );
    assert!(matches!(again, Err(Error::ProjectExists(_))));
    assert!(matches!(Project::open(dir.path().join("elsewhere")), Err(Error::NoProject(_))));
}
