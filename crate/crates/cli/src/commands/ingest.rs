//! `ingest`: converts a corpus file into the canonical JSON form, validating
//! every record on the way.

use std::path::{Path, PathBuf};

use bidforge::corpus::{load_corpus, save_corpus};
use bidforge::CorpusFormat;

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::manifest::prepare_output;

/// What `ingest` produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestReport {
    pub records: usize,
    pub output: PathBuf,
}

/// Loads `input` (format from the flag or the file extension), validates it,
/// and writes the canonical JSON corpus into the output directory.
pub fn cmd_ingest(
    config: &PipelineConfig,
    input: &Path,
    format: Option<CorpusFormat>,
) -> Result<IngestReport, CliError> {
    let format = format
        .or_else(|| CorpusFormat::from_extension(input))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "cannot infer corpus format of {} from its extension; pass --format",
                input.display()
            ))
        })?;
    let corpus = load_corpus(input, format)?;
    let output = prepare_output(&config.output_dir, "corpus.json")?;
    save_corpus(&corpus.records, &output, CorpusFormat::Json)?;
    Ok(IngestReport {
        records: corpus.records.len(),
        output,
    })
}
