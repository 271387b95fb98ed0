//! `build-datasets`: compiles the four generator and three evaluator
//! fine-tuning datasets from the corpus, splits each into train/validation,
//! and writes everything with a manifest per dataset.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bidforge::datagen::{
    batch_size_rule, build_evaluator_dataset, build_generator_dataset, build_negative_samples,
    export_jsonl, split, ModelKind, SplitConfig,
};
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{io_error, CliError};

/// The per-dataset manifest written next to its JSONL files, carrying what a
/// fine-tune submission needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub kind: String,
    pub dataset_path: String,
    pub train_path: String,
    pub validation_path: String,
    pub examples: usize,
    pub train_count: usize,
    pub validation_count: usize,
    pub seed: u64,
    pub batch_size: usize,
    /// Record ids skipped because a needed field was missing.
    pub skipped_records: Vec<String>,
}

/// One dataset's row in the combined manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub kind: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<SplitManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The combined manifest for all seven datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetsManifest {
    pub seed: u64,
    pub datasets: Vec<DatasetEntry>,
    #[serde(skip)]
    pub path: PathBuf,
}

impl DatasetsManifest {
    /// The split manifest for one kind, if that dataset built successfully.
    pub fn split_manifest(&self, kind: ModelKind) -> Option<&SplitManifest> {
        self.datasets
            .iter()
            .find(|d| d.kind == kind.slug())
            .and_then(|d| d.manifest.as_ref())
    }
}

/// Builds all seven datasets under `<output>/datasets/`.
///
/// Each dataset is built independently: one kind failing (for example Gen3
/// over a corpus with no challenges) still lets the others complete and be
/// written. The command then fails with the first error, tagged with its
/// dataset kind.
pub fn cmd_build_datasets(config: &PipelineConfig) -> Result<DatasetsManifest, CliError> {
    let corpus = config.load_corpus()?;
    let dir = config.output_dir.join("datasets");
    std::fs::create_dir_all(&dir).map_err(|source| io_error(&dir, source))?;
    let split_config = SplitConfig {
        seed: config.seed,
        ..SplitConfig::default()
    };

    // The three evaluator datasets share one negative-sample assignment.
    let negatives = config.models.random_inno.as_deref().map_or_else(
        || {
            Err(CliError::Config(
                "config key models.random_inno is required".into(),
            ))
        },
        |model| {
            let backend = config.build_backend()?;
            Ok(build_negative_samples(
                &corpus.records,
                backend.as_ref(),
                model,
            )?)
        },
    );

    let mut entries = Vec::new();
    let mut first_error: Option<CliError> = None;
    for kind in ModelKind::ALL {
        let result = build_one(config, &corpus.records, kind, &negatives, &dir, &split_config);
        match result {
            Ok(manifest) => entries.push(DatasetEntry {
                kind: kind.slug().to_string(),
                status: "ok".into(),
                manifest: Some(manifest),
                error: None,
            }),
            Err(source) => {
                let err = CliError::Dataset {
                    kind: kind.slug(),
                    source: Box::new(source),
                };
                entries.push(DatasetEntry {
                    kind: kind.slug().to_string(),
                    status: "failed".into(),
                    manifest: None,
                    error: Some(err.single_line()),
                });
                first_error.get_or_insert(err);
            }
        }
    }

    let path = dir.join("manifest.json");
    let manifest = DatasetsManifest {
        seed: config.seed,
        datasets: entries,
        path: path.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, json + "\n").map_err(|source| io_error(&path, source))?;

    match first_error {
        Some(err) => Err(err),
        None => Ok(manifest),
    }
}

fn build_one(
    config: &PipelineConfig,
    records: &[bidforge::InnovationRecord],
    kind: ModelKind,
    negatives: &Result<BTreeMap<String, String>, CliError>,
    dir: &Path,
    split_config: &SplitConfig,
) -> Result<SplitManifest, CliError> {
    let build = if kind.is_generator() {
        build_generator_dataset(records, kind)?
    } else {
        let negatives = match negatives {
            Ok(n) => n,
            // The shared negative build failed; surface its message per kind
            // without re-running it.
            Err(e) => return Err(CliError::Config(e.to_string())),
        };
        build_evaluator_dataset(records, negatives, kind)?
    };

    let slug = kind.slug();
    let dataset_path = dir.join(format!("{slug}.jsonl"));
    export_jsonl(&build.examples, &dataset_path)?;

    let labeled = split(kind, build.examples, split_config)?;
    let train_path = dir.join(format!("{slug}.train.jsonl"));
    let validation_path = dir.join(format!("{slug}.validation.jsonl"));
    export_jsonl(&labeled.train, &train_path)?;
    export_jsonl(&labeled.validation, &validation_path)?;

    let manifest = SplitManifest {
        kind: slug.to_string(),
        dataset_path: dataset_path.display().to_string(),
        train_path: train_path.display().to_string(),
        validation_path: validation_path.display().to_string(),
        examples: labeled.train.len() + labeled.validation.len(),
        train_count: labeled.train.len(),
        validation_count: labeled.validation.len(),
        seed: config.seed,
        batch_size: batch_size_rule(labeled.train.len()),
        skipped_records: build.skipped,
    };
    let manifest_path = dir.join(format!("{slug}.manifest.json"));
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&manifest_path, json + "\n")
        .map_err(|source| io_error(&manifest_path, source))?;
    Ok(manifest)
}
