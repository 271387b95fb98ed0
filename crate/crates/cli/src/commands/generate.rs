//! `generate`: samples completions for one problem spec and writes the
//! parsed concepts as a JSON-lines store.

use std::path::PathBuf;

use bidforge::concept::{
    generate_concepts, save_concepts, tag_source_categories, ConceptError, GenerationParams,
};
use bidforge::ProblemSpec;

use crate::config::PipelineConfig;
use crate::error::CliError;
use crate::manifest::prepare_output;

/// What `generate` produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerateReport {
    pub store: PathBuf,
    pub obtained: usize,
    pub requested: usize,
    pub rejects: usize,
    pub attempts: usize,
}

/// Generates `n` concepts (config default when `None`) for `spec` and writes
/// them to `<output>/<store_name>` (default `concepts-<type>.jsonl`).
///
/// When the sampling budget runs out first, the partial store is still
/// written before the error surfaces, so no sampled work is lost.
pub fn cmd_generate(
    config: &PipelineConfig,
    spec: &ProblemSpec,
    n: Option<usize>,
    id_prefix: Option<String>,
    store_name: Option<&str>,
) -> Result<GenerateReport, CliError> {
    let n = n.unwrap_or(config.generation.n);
    let concept_type = spec.concept_type();
    let model = config.generator_model(concept_type)?.to_string();
    let backend = config.build_backend()?;
    let lexicon = config.load_lexicon()?;

    let params = GenerationParams {
        model,
        temperature: config.generation.temperature,
        max_tokens: config.generation.max_tokens,
        budget: config.generation.budget,
        created_at: 0,
        id_prefix,
    };
    let default_name = format!("concepts-{}.jsonl", concept_type.slug());
    let store = prepare_output(&config.output_dir, store_name.unwrap_or(&default_name))?;

    match generate_concepts(spec, n, backend.as_ref(), &params) {
        Ok(mut outcome) => {
            tag_source_categories(&mut outcome.concepts, &lexicon);
            save_concepts(&outcome.concepts, &store)?;
            Ok(GenerateReport {
                store,
                obtained: outcome.concepts.len(),
                requested: outcome.requested,
                rejects: outcome.rejects.len(),
                attempts: outcome.attempts,
            })
        }
        Err(ConceptError::BudgetExhausted {
            obtained,
            requested,
            attempts,
            mut partial,
        }) => {
            tag_source_categories(&mut partial.concepts, &lexicon);
            save_concepts(&partial.concepts, &store)?;
            Err(CliError::Generation(ConceptError::BudgetExhausted {
                obtained,
                requested,
                attempts,
                partial,
            }))
        }
        Err(other) => Err(other.into()),
    }
}
