//! `pipeline`: generate → evaluate → wmd in one run, with a manifest
//! recording each stage's status, outputs, and timing.
//!
//! The run stops at the first fatal stage, keeping every artifact written so
//! far, and the manifest still records what happened — failed experiments
//! stay inspectable and resumable per stage.

use std::collections::BTreeSet;
use std::path::PathBuf;

use bidforge::concept::load_concepts;
use bidforge::{GeneratedConcept, ProblemSpec};

use crate::commands::evaluate::evaluate_loaded;
use crate::commands::generate::cmd_generate;
use crate::commands::wmd::wmd_over_concepts;
use crate::config::PipelineConfig;
use crate::error::{io_error, CliError};
use crate::manifest::{relative_to, timed, RunManifest, StageRecord, StageStatus};

/// What `pipeline` produced.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

/// Runs the full pipeline for one or more problem specs (at most one per
/// concept type, since each type writes one store).
///
/// The manifest is written to `<output>/run_manifest.json` whether the run
/// succeeds or fails.
pub fn cmd_pipeline(
    config: &PipelineConfig,
    specs: &[ProblemSpec],
    n: Option<usize>,
) -> Result<PipelineReport, CliError> {
    if specs.is_empty() {
        return Err(CliError::Usage(
            "pipeline needs at least one problem spec".into(),
        ));
    }
    let mut seen = BTreeSet::new();
    for spec in specs {
        if !seen.insert(spec.concept_type()) {
            return Err(CliError::Usage(format!(
                "more than one {} spec: each concept type writes one store per run",
                spec.concept_type().slug()
            )));
        }
    }

    let input_digest = serde_json::to_string(&(specs, n)).expect("specs serialize");
    let mut manifest = RunManifest::new(&config.hash(), config.seed, &input_digest);
    let out_dir = &config.output_dir;
    std::fs::create_dir_all(out_dir).map_err(|source| io_error(out_dir, source))?;
    let manifest_path = out_dir.join("run_manifest.json");

    let stage_names = ["generate", "evaluate", "wmd"];
    let mut failed: Option<CliError> = None;

    // Stage 1: generate one store per spec.
    let mut stores: Vec<PathBuf> = Vec::new();
    let (result, duration_ms) = timed(|| {
        let mut outputs = Vec::new();
        for spec in specs {
            let report = cmd_generate(config, spec, n, None, None)?;
            outputs.push(report.store.clone());
            stores.push(report.store);
        }
        Ok::<Vec<PathBuf>, CliError>(outputs)
    });
    record_stage(&mut manifest, "generate", result, duration_ms, out_dir, &mut failed);

    // Stage 2: evaluate every generated concept together.
    if failed.is_none() {
        let (result, duration_ms) = timed(|| {
            let mut concepts: Vec<GeneratedConcept> = Vec::new();
            for store in &stores {
                concepts.extend(load_concepts(store)?);
            }
            let backend = config.build_backend()?;
            let report = evaluate_loaded(config, &concepts, backend.as_ref(), out_dir)?;
            Ok::<Vec<PathBuf>, CliError>(vec![report.verdicts_path, report.pass_rates_path])
        });
        record_stage(&mut manifest, "evaluate", result, duration_ms, out_dir, &mut failed);
    }

    // Stage 3: distance report against the corpus innovations.
    if failed.is_none() {
        let (result, duration_ms) = timed(|| {
            let corpus = config.load_corpus()?;
            let mut concepts: Vec<GeneratedConcept> = Vec::new();
            for store in &stores {
                concepts.extend(load_concepts(store)?);
            }
            let report = wmd_over_concepts(config, &concepts, &corpus, &corpus, out_dir)?;
            Ok::<Vec<PathBuf>, CliError>(vec![
                report.distances_path,
                report.summary_path,
                report.histogram_path,
            ])
        });
        record_stage(&mut manifest, "wmd", result, duration_ms, out_dir, &mut failed);
    }

    // Stages never reached are recorded as skipped.
    for name in stage_names {
        if !manifest.stages.iter().any(|s| s.name == name) {
            manifest.stages.push(StageRecord {
                name: name.into(),
                status: StageStatus::Skipped,
                outputs: vec![],
                duration_ms: 0,
                error: None,
            });
        }
    }

    manifest.save(&manifest_path)?;
    match failed {
        Some(source) => {
            let stage = manifest
                .stages
                .iter()
                .find(|s| s.status == StageStatus::Failed)
                .map(|s| s.name.clone())
                .unwrap_or_default();
            let stage: &'static str = stage_names
                .iter()
                .find(|n| **n == stage)
                .copied()
                .unwrap_or("pipeline");
            Err(CliError::Stage {
                stage,
                source: Box::new(source),
            })
        }
        None => Ok(PipelineReport {
            manifest,
            manifest_path,
        }),
    }
}

fn record_stage(
    manifest: &mut RunManifest,
    name: &'static str,
    result: Result<Vec<PathBuf>, CliError>,
    duration_ms: u64,
    out_dir: &std::path::Path,
    failed: &mut Option<CliError>,
) {
    match result {
        Ok(outputs) => manifest.stages.push(StageRecord {
            name: name.into(),
            status: StageStatus::Ok,
            outputs: outputs
                .iter()
                .map(|p| relative_to(p, out_dir))
                .collect(),
            duration_ms,
            error: None,
        }),
        Err(e) => {
            manifest.stages.push(StageRecord {
                name: name.into(),
                status: StageStatus::Failed,
                outputs: vec![],
                duration_ms,
                error: Some(e.single_line()),
            });
            *failed = Some(e);
        }
    }
}
