//! The command-line error type: every failure maps to one stable category
//! token so scripts can dispatch on `error[<category>]:` lines.

use bidforge::backend::BackendError;
use bidforge::{ConceptError, CorpusError, DatagenError, DiversityError, RelevancyError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Datagen(#[from] DatagenError),
    #[error(transparent)]
    Generation(#[from] ConceptError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Relevancy(#[from] RelevancyError),
    #[error(transparent)]
    Diversity(#[from] DiversityError),
    #[error("bad ratings row at line {line}: {message}")]
    RatingsSchema { line: usize, message: String },
    #[error("rated concept {id} is not in the concept store")]
    UnknownConcept { id: String },
    #[error("dataset {kind}: {source}")]
    Dataset {
        kind: &'static str,
        source: Box<CliError>,
    },
    #[error("fine-tune job {job_id} for dataset {kind} ended in status {status}")]
    FinetuneFailed {
        kind: &'static str,
        job_id: String,
        status: String,
    },
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        source: Box<CliError>,
    },
}

impl CliError {
    /// The stable category token for machine parsing.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Corpus(_) => "corpus",
            CliError::Datagen(_) => "datagen",
            CliError::Generation(_) => "generation",
            CliError::Backend(_) => "backend",
            CliError::Relevancy(_) => "relevancy",
            CliError::Diversity(_) => "diversity",
            CliError::RatingsSchema { .. } | CliError::UnknownConcept { .. } => "ratings",
            CliError::Dataset { source, .. } => source.category(),
            CliError::FinetuneFailed { .. } => "finetune",
            CliError::Stage { source, .. } => source.category(),
        }
    }

    /// Process exit code: 2 for configuration/usage mistakes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Dataset { source, .. } | CliError::Stage { source, .. } => {
                source.exit_code()
            }
            _ => 1,
        }
    }

    /// The single-line form printed to stderr: `error[<category>]: <message>`
    /// with interior newlines flattened.
    pub fn single_line(&self) -> String {
        let message = self.to_string().replace('\n', " ");
        format!("error[{}]: {}", self.category(), message)
    }
}

/// Shorthand for IO failures tagged with their path.
pub fn io_error(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}
