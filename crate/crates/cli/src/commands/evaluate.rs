//! `evaluate`: runs the relevancy evaluators over a concept store and writes
//! verdicts plus the pass-rate table.

use std::path::{Path, PathBuf};

use bidforge::backend::Backend;
use bidforge::concept::load_concepts;
use bidforge::relevancy::{evaluate_concepts, pass_rate_table, write_verdicts_csv, PassRateTable};
use bidforge::GeneratedConcept;

use crate::config::PipelineConfig;
use crate::error::{io_error, CliError};
use crate::manifest::prepare_output;

/// What `evaluate` produced.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateReport {
    pub verdicts_path: PathBuf,
    pub pass_rates_path: PathBuf,
    pub verdicts: usize,
    pub table: PassRateTable,
}

/// Evaluates every concept in `store` and writes `verdicts.csv` and
/// `pass_rates.csv` into the output directory.
pub fn cmd_evaluate(config: &PipelineConfig, store: &Path) -> Result<EvaluateReport, CliError> {
    let concepts = load_concepts(store)?;
    let backend = config.build_backend()?;
    evaluate_loaded(config, &concepts, backend.as_ref(), &config.output_dir)
}

/// The evaluate stage over already-loaded concepts, shared with `pipeline`.
pub(crate) fn evaluate_loaded(
    config: &PipelineConfig,
    concepts: &[GeneratedConcept],
    backend: &dyn Backend,
    out_dir: &Path,
) -> Result<EvaluateReport, CliError> {
    let models = config.evaluator_models()?;
    let verdicts = evaluate_concepts(concepts, backend, &models)?;

    let verdicts_path = prepare_output(out_dir, "verdicts.csv")?;
    write_verdicts_csv(&verdicts, &verdicts_path)?;

    let table = pass_rate_table(concepts, &verdicts)?;
    let pass_rates_path = out_dir.join("pass_rates.csv");
    std::fs::write(&pass_rates_path, table.to_csv())
        .map_err(|source| io_error(&pass_rates_path, source))?;

    Ok(EvaluateReport {
        verdicts_path,
        pass_rates_path,
        verdicts: verdicts.len(),
        table,
    })
}
