//! The eight subcommand implementations, written as library functions that
//! return report structures; the binary layer renders them for the terminal.

mod datasets;
mod evaluate;
mod finetune;
mod generate;
mod ingest;
mod pipeline;
mod ratings;
mod wmd;

pub use datasets::{cmd_build_datasets, DatasetEntry, DatasetsManifest, SplitManifest};
pub use evaluate::{cmd_evaluate, EvaluateReport};
pub use finetune::{cmd_finetune, FinetuneEntry, FinetuneReport};
pub use generate::{cmd_generate, GenerateReport};
pub use ingest::{cmd_ingest, IngestReport};
pub use pipeline::{cmd_pipeline, PipelineReport};
pub use ratings::{cmd_ratings, ConceptRatingSummary, RatingsReport, ScoreStats, TypeRatingSummary};
pub use wmd::{cmd_wmd, WmdReport};
