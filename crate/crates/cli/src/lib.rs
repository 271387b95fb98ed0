//! Command-line front end for the bidforge pipeline: corpus ingestion,
//! dataset compilation, fine-tune orchestration, concept generation,
//! relevancy evaluation, distance reporting, and human-rating summaries.
//!
//! Every command reads one flat key-value config file, draws all randomness
//! from the single configured seed, and exits nonzero with a one-line
//! machine-parsable error (`error[category]: message`) on failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

pub use commands::{
    cmd_build_datasets, cmd_evaluate, cmd_finetune, cmd_generate, cmd_ingest, cmd_pipeline,
    cmd_ratings, cmd_wmd, DatasetsManifest, EvaluateReport, FinetuneEntry, FinetuneReport,
    GenerateReport, IngestReport, PipelineReport, RatingsReport, WmdReport,
};
pub use config::{BackendKind, PipelineConfig, API_KEY_ENV};
pub use error::CliError;
pub use manifest::{RunManifest, StageRecord, StageStatus};
