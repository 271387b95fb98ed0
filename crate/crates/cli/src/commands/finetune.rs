//! `finetune`: submits fine-tune jobs for built datasets and polls them to a
//! terminal status.

use std::path::PathBuf;

use bidforge::backend::{BaseModel, FineTuneJob, JobStatus};
use bidforge::datagen::ModelKind;
use serde::{Deserialize, Serialize};

use crate::commands::datasets::SplitManifest;
use crate::config::PipelineConfig;
use crate::error::{io_error, CliError};
use crate::manifest::prepare_output;

/// Hard cap on status polls per job, against servers that never settle.
const MAX_POLLS: usize = 10_000;

/// One submitted job's final state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinetuneEntry {
    pub kind: String,
    pub job_id: String,
    pub status: JobStatus,
    pub fine_tuned_model: Option<String>,
    pub per_epoch_validation_accuracy: Vec<f64>,
    pub polls: usize,
}

/// What `finetune` did, written to `<output>/finetune/jobs.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinetuneReport {
    pub jobs: Vec<FinetuneEntry>,
    #[serde(skip)]
    pub output: PathBuf,
}

/// Submits one job per requested dataset kind (all seven when `kinds` is
/// empty) and polls each to completion. Dataset paths and batch sizes come
/// from the split manifests that `build-datasets` wrote.
pub fn cmd_finetune(
    config: &PipelineConfig,
    kinds: &[ModelKind],
    epochs: usize,
) -> Result<FinetuneReport, CliError> {
    if epochs == 0 {
        return Err(CliError::Usage("--epochs must be at least 1".into()));
    }
    let kinds: Vec<ModelKind> = if kinds.is_empty() {
        ModelKind::ALL.to_vec()
    } else {
        kinds.to_vec()
    };
    let backend = config.build_backend()?;
    let datasets_dir = config.output_dir.join("datasets");
    let poll_interval = std::time::Duration::from_millis(config.backend.poll_interval_ms);

    let mut jobs = Vec::new();
    for kind in &kinds {
        let manifest_path = datasets_dir.join(format!("{}.manifest.json", kind.slug()));
        let text = std::fs::read_to_string(&manifest_path).map_err(|source| {
            if source.kind() == std::io::ErrorKind::NotFound {
                CliError::Usage(format!(
                    "no split manifest for dataset {}: run build-datasets first (expected {})",
                    kind.slug(),
                    manifest_path.display()
                ))
            } else {
                io_error(&manifest_path, source)
            }
        })?;
        let manifest: SplitManifest = serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!("bad manifest {}: {e}", manifest_path.display()))
        })?;

        let base_model = if kind.is_generator() {
            BaseModel::Generator
        } else {
            BaseModel::Classifier
        };
        let job = FineTuneJob::new(
            base_model,
            PathBuf::from(&manifest.train_path),
            epochs,
            manifest.batch_size,
        );
        let job_id = backend.submit_finetune(&job)?;

        let mut polls = 0usize;
        let polled = loop {
            let polled = backend.poll_finetune(&job_id)?;
            polls += 1;
            if polled.status.is_terminal() {
                break polled;
            }
            if polls >= MAX_POLLS {
                return Err(CliError::FinetuneFailed {
                    kind: kind.slug(),
                    job_id,
                    status: format!("still {:?} after {MAX_POLLS} polls", polled.status),
                });
            }
            if !poll_interval.is_zero() {
                std::thread::sleep(poll_interval);
            }
        };
        jobs.push(FinetuneEntry {
            kind: kind.slug().to_string(),
            job_id,
            status: polled.status,
            fine_tuned_model: polled.fine_tuned_model,
            per_epoch_validation_accuracy: polled.per_epoch_validation_accuracy,
            polls,
        });
    }

    let output = prepare_output(&config.output_dir.join("finetune"), "jobs.json")?;
    let report = FinetuneReport {
        jobs,
        output: output.clone(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&output, json + "\n").map_err(|source| io_error(&output, source))?;

    if let Some(failed) = report.jobs.iter().find(|j| j.status == JobStatus::Failed) {
        return Err(CliError::FinetuneFailed {
            kind: ModelKind::ALL
                .iter()
                .find(|k| k.slug() == failed.kind)
                .map(|k| k.slug())
                .unwrap_or("unknown"),
            job_id: failed.job_id.clone(),
            status: "failed".into(),
        });
    }
    Ok(report)
}
