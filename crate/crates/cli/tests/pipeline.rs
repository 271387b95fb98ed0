//! End-to-end checks for the composed pipeline: determinism, manifest
//! semantics, and stop-at-first-fatal-stage behavior.

mod common;

use std::collections::BTreeMap;
use std::path::Path;

use bidforge::ProblemSpec;
use bidforge_cli::commands::cmd_pipeline;
use bidforge_cli::config::PipelineConfig;
use bidforge_cli::error::CliError;
use bidforge_cli::manifest::{RunManifest, StageStatus};

fn case_study_specs() -> Vec<ProblemSpec> {
    vec![
        ProblemSpec::Type1 {
            applications: vec!["Flying car".into()],
        },
        ProblemSpec::Type2 {
            benefits: vec!["Lightweight".into()],
            applications: vec!["Flying car".into()],
        },
        ProblemSpec::Type3 {
            challenge: "Lightweight design is a challenge for flying cars.".into(),
        },
    ]
}

/// Reads every regular file under `dir` into a map keyed by relative path.
fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(dir: &Path, base: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, base, out);
            } else {
                let rel = path.strip_prefix(base).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

#[test]
fn two_runs_with_the_same_seed_are_byte_identical_modulo_timings() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let config_a = common::workspace(dir_a.path(), 20, 42, "");
    let config_b = common::workspace(dir_b.path(), 20, 42, "");

    let report_a = cmd_pipeline(&config_a, &case_study_specs(), Some(5)).unwrap();
    let report_b = cmd_pipeline(&config_b, &case_study_specs(), Some(5)).unwrap();

    // Rerunning the same workspace reproduces the manifest exactly, timings
    // aside (run_id and config_hash included).
    let rerun = cmd_pipeline(&config_a, &case_study_specs(), Some(5)).unwrap();
    assert_eq!(
        rerun.manifest.without_timings(),
        report_a.manifest.without_timings()
    );

    // A second workspace hashes to a different config (paths are part of the
    // configuration) but runs the same stages to the same outcome.
    assert_eq!(report_a.manifest.seed, report_b.manifest.seed);
    assert_eq!(
        report_a.manifest.without_timings().stages,
        report_b.manifest.without_timings().stages
    );

    // Every artifact byte-identical across the two workspaces, manifest
    // aside (its config hash names workspace-specific paths).
    let mut files_a = snapshot(&config_a.output_dir);
    let mut files_b = snapshot(&config_b.output_dir);
    files_a.remove("run_manifest.json");
    files_b.remove("run_manifest.json");
    assert_eq!(
        files_a.keys().collect::<Vec<_>>(),
        files_b.keys().collect::<Vec<_>>()
    );
    for (name, bytes) in &files_a {
        assert_eq!(Some(bytes), files_b.get(name), "{name} differs across runs");
    }

    // The three stores, two evaluation tables, and three distance artifacts.
    let outputs = report_a.manifest.all_outputs();
    assert!(outputs.len() >= 5, "only {} outputs listed", outputs.len());
    for expected in [
        "concepts-type1.jsonl",
        "concepts-type2.jsonl",
        "concepts-type3.jsonl",
        "verdicts.csv",
        "pass_rates.csv",
        "diversity.csv",
        "diversity_summary.json",
        "diversity_histogram.json",
    ] {
        assert!(
            outputs.contains(&expected),
            "{expected} missing from manifest outputs {outputs:?}"
        );
    }

    // All three stages ran.
    assert_eq!(report_a.manifest.stages.len(), 3);
    assert!(report_a
        .manifest
        .stages
        .iter()
        .all(|s| s.status == StageStatus::Ok));

    // The saved manifest loads back as the most recent run wrote it.
    let loaded = RunManifest::load(&report_a.manifest_path).unwrap();
    assert_eq!(loaded, rerun.manifest);
}

#[test]
fn type1_rows_in_the_diversity_csv_have_no_problem_solution_column() {
    // The distances CSV has a fixed 4-column schema for every row; the
    // pass-rate table is where type1's absent problem–solution evaluator
    // shows up as empty cells.
    let dir = tempfile::tempdir().unwrap();
    let config = common::workspace(dir.path(), 20, 42, "");
    cmd_pipeline(&config, &case_study_specs(), Some(5)).unwrap();

    let rates = std::fs::read_to_string(config.output_dir.join("pass_rates.csv")).unwrap();
    let type1_row = rates
        .lines()
        .find(|l| l.starts_with("type1,"))
        .expect("type1 row present");
    let cols: Vec<&str> = type1_row.split(',').collect();
    assert_eq!(cols.len(), 10);
    assert_eq!(
        (cols[4], cols[5], cols[6]),
        ("", "", ""),
        "problem–solution cells empty for type1: {type1_row}"
    );
    let type2_row = rates.lines().find(|l| l.starts_with("type2,")).unwrap();
    let cols2: Vec<&str> = type2_row.split(',').collect();
    assert!(!cols2[4].is_empty(), "type2 fills the cells: {type2_row}");
}

#[test]
fn different_seeds_produce_different_stores() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let config_a = common::workspace(dir_a.path(), 20, 1, "");
    let config_b = common::workspace(dir_b.path(), 20, 2, "");

    cmd_pipeline(&config_a, &case_study_specs(), Some(5)).unwrap();
    cmd_pipeline(&config_b, &case_study_specs(), Some(5)).unwrap();

    let store_a = std::fs::read(config_a.output_dir.join("concepts-type1.jsonl")).unwrap();
    let store_b = std::fs::read(config_b.output_dir.join("concepts-type1.jsonl")).unwrap();
    assert_ne!(store_a, store_b);
}

#[test]
fn a_missing_embedding_path_fails_at_the_wmd_stage_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = common::workspace(dir.path(), 20, 42, "");
    config.embeddings_path = None;

    let err = cmd_pipeline(&config, &case_study_specs(), Some(5)).unwrap_err();
    match &err {
        CliError::Stage { stage, .. } => assert_eq!(*stage, "wmd"),
        other => panic!("expected a stage error, got {other:?}"),
    }
    assert_eq!(err.category(), "config");
    assert!(err.single_line().starts_with("error[config]: "));

    // Earlier stages ran and their artifacts survive.
    let manifest = RunManifest::load(&config.output_dir.join("run_manifest.json")).unwrap();
    let by_name: BTreeMap<&str, StageStatus> = manifest
        .stages
        .iter()
        .map(|s| (s.name.as_str(), s.status))
        .collect();
    assert_eq!(by_name["generate"], StageStatus::Ok);
    assert_eq!(by_name["evaluate"], StageStatus::Ok);
    assert_eq!(by_name["wmd"], StageStatus::Failed);
    let wmd = manifest.stages.iter().find(|s| s.name == "wmd").unwrap();
    assert!(wmd.error.as_deref().unwrap().contains("embeddings.path"));

    for kept in ["concepts-type1.jsonl", "verdicts.csv", "pass_rates.csv"] {
        assert!(
            config.output_dir.join(kept).is_file(),
            "{kept} retained after the wmd failure"
        );
    }
    assert!(!config.output_dir.join("diversity.csv").exists());
}

#[test]
fn a_generate_failure_skips_the_later_stages() {
    let dir = tempfile::tempdir().unwrap();
    // A budget of 1 cannot satisfy n = 5, so generation fails immediately.
    let config = common::workspace(dir.path(), 20, 42, "generation.budget = 1\n");

    let err = cmd_pipeline(&config, &case_study_specs(), Some(5)).unwrap_err();
    match &err {
        CliError::Stage { stage, .. } => assert_eq!(*stage, "generate"),
        other => panic!("expected a stage error, got {other:?}"),
    }
    assert_eq!(err.category(), "generation");

    let manifest = RunManifest::load(&config.output_dir.join("run_manifest.json")).unwrap();
    let by_name: BTreeMap<&str, StageStatus> = manifest
        .stages
        .iter()
        .map(|s| (s.name.as_str(), s.status))
        .collect();
    assert_eq!(by_name["generate"], StageStatus::Failed);
    assert_eq!(by_name["evaluate"], StageStatus::Skipped);
    assert_eq!(by_name["wmd"], StageStatus::Skipped);

    // The partial store from the failed stage is retained.
    let partial =
        bidforge::concept::load_concepts(&config.output_dir.join("concepts-type1.jsonl")).unwrap();
    assert_eq!(partial.len(), 1);
}

#[test]
fn duplicate_concept_types_are_rejected_up_front() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::workspace(dir.path(), 20, 42, "");
    let specs = vec![
        ProblemSpec::Type1 {
            applications: vec!["Flying car".into()],
        },
        ProblemSpec::Type1 {
            applications: vec!["Drone".into()],
        },
    ];
    let err = cmd_pipeline(&config, &specs, Some(3)).unwrap_err();
    assert_eq!(err.category(), "usage");
    assert!(!config.output_dir.join("run_manifest.json").exists());
}

#[test]
fn empty_specs_are_rejected_up_front() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::workspace(dir.path(), 20, 42, "");
    let err = cmd_pipeline(&config, &[], Some(3)).unwrap_err();
    assert_eq!(err.category(), "usage");
}

#[test]
fn the_run_id_tracks_config_seed_and_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::workspace(dir.path(), 20, 42, "");

    let a = cmd_pipeline(&config, &case_study_specs(), Some(5)).unwrap();
    let b = cmd_pipeline(&config, &case_study_specs(), Some(5)).unwrap();
    assert_eq!(a.manifest.run_id, b.manifest.run_id, "same inputs, same id");

    let c = cmd_pipeline(&config, &case_study_specs(), Some(4)).unwrap();
    assert_ne!(a.manifest.run_id, c.manifest.run_id, "different n, new id");

    let mut reseeded: PipelineConfig = config.clone();
    reseeded.seed = 43;
    let d = cmd_pipeline(&reseeded, &case_study_specs(), Some(5)).unwrap();
    assert_ne!(a.manifest.run_id, d.manifest.run_id, "different seed, new id");
}
