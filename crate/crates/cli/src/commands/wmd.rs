//! `wmd`: measures semantic distance between generated concepts and original
//! innovations, writing the raw distances, a statistics summary, and
//! histogram bins.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use bidforge::concept::load_concepts;
use bidforge::diversity::{diversity_report, EmbeddingStore, HISTOGRAM_BINS};
use bidforge::{ConceptType, Corpus, GeneratedConcept};

use crate::config::PipelineConfig;
use crate::error::{io_error, CliError};
use crate::manifest::prepare_output;

/// What `wmd` produced.
#[derive(Debug, Clone, PartialEq)]
pub struct WmdReport {
    pub distances_path: PathBuf,
    pub summary_path: PathBuf,
    pub histogram_path: PathBuf,
    pub generated_distances: usize,
    pub baseline_distances: usize,
    /// Concept/record ids whose text was empty after preprocessing.
    pub skipped: Vec<String>,
    /// Whether concepts were matched to seeds by id prefix (true) or pooled
    /// against every original (false).
    pub per_seed: bool,
}

/// Runs the distance report for a concept store against original innovations
/// (`originals`) and a comparison pool (`baseline`).
pub fn cmd_wmd(
    config: &PipelineConfig,
    store: &Path,
    originals: &Path,
    baseline: &Path,
) -> Result<WmdReport, CliError> {
    let concepts = load_concepts(store)?;
    let originals = load_corpus_at(originals)?;
    let baseline = load_corpus_at(baseline)?;
    wmd_over_concepts(config, &concepts, &originals, &baseline, &config.output_dir)
}

fn load_corpus_at(path: &Path) -> Result<Corpus, CliError> {
    let format = bidforge::CorpusFormat::from_extension(path).ok_or_else(|| {
        CliError::Usage(format!(
            "cannot infer corpus format of {} from its extension",
            path.display()
        ))
    })?;
    Ok(bidforge::corpus::load_corpus(path, format)?)
}

/// The wmd stage over already-loaded inputs, shared with `pipeline`.
///
/// Concepts are assigned to seed samples by id prefix: when every concept id
/// starts with `"<record id>-"` for some originals record, each concept is
/// measured against its own seed's innovation. Otherwise the store is pooled:
/// every original is a sample and every concept is measured against each of
/// them. Either way the baseline measures each original against the rest of
/// the pool.
pub(crate) fn wmd_over_concepts(
    config: &PipelineConfig,
    concepts: &[GeneratedConcept],
    originals: &Corpus,
    baseline: &Corpus,
    out_dir: &Path,
) -> Result<WmdReport, CliError> {
    let embeddings_path = config.require_embeddings()?;
    let store = EmbeddingStore::load(embeddings_path, config.embeddings_format)?;
    let stopwords = config.load_stopwords()?;

    let cells = assign_cells(concepts, &originals.records);
    let per_seed = cells.is_some();
    let generated = cells.unwrap_or_else(|| pooled_cells(concepts, &originals.records));

    let report = diversity_report(
        &originals.records,
        &generated,
        &baseline.records,
        &store,
        &stopwords,
    )?;

    let distances_path = prepare_output(out_dir, "diversity.csv")?;
    std::fs::write(&distances_path, report.to_distances_csv())
        .map_err(|source| io_error(&distances_path, source))?;

    let summary_path = out_dir.join("diversity_summary.json");
    let summary_json =
        serde_json::to_string_pretty(&report.summary()).expect("summary serializes");
    std::fs::write(&summary_path, summary_json + "\n")
        .map_err(|source| io_error(&summary_path, source))?;

    let histogram_path = out_dir.join("diversity_histogram.json");
    let histogram_json =
        serde_json::to_string_pretty(&report.histogram(HISTOGRAM_BINS)).expect("serializes");
    std::fs::write(&histogram_path, histogram_json + "\n")
        .map_err(|source| io_error(&histogram_path, source))?;

    let mut skipped: Vec<String> = Vec::new();
    for cell in &report.cells {
        skipped.extend(cell.skipped.iter().cloned());
    }
    for row in &report.baselines {
        skipped.extend(row.skipped.iter().cloned());
    }
    skipped.sort();
    skipped.dedup();

    Ok(WmdReport {
        distances_path,
        summary_path,
        histogram_path,
        generated_distances: report.total_generated(),
        baseline_distances: report.total_baseline(),
        skipped,
        per_seed,
    })
}

/// Per-seed cell assignment: `Some` when every concept id carries exactly
/// one record's `"<id>-"` prefix (longest prefix wins if ids nest).
fn assign_cells(
    concepts: &[GeneratedConcept],
    records: &[bidforge::InnovationRecord],
) -> Option<BTreeMap<(String, ConceptType), Vec<GeneratedConcept>>> {
    let mut cells: BTreeMap<(String, ConceptType), Vec<GeneratedConcept>> = BTreeMap::new();
    for concept in concepts {
        let seed = records
            .iter()
            .filter(|r| concept.id.starts_with(&format!("{}-", r.id)))
            .max_by_key(|r| r.id.len())?;
        cells
            .entry((seed.id.clone(), concept.spec.concept_type()))
            .or_default()
            .push(concept.clone());
    }
    Some(cells)
}

/// Pooled cell assignment: every original record is a sample; each type's
/// concepts are measured against all of them.
fn pooled_cells(
    concepts: &[GeneratedConcept],
    records: &[bidforge::InnovationRecord],
) -> BTreeMap<(String, ConceptType), Vec<GeneratedConcept>> {
    let mut by_type: BTreeMap<ConceptType, Vec<GeneratedConcept>> = BTreeMap::new();
    for concept in concepts {
        by_type
            .entry(concept.spec.concept_type())
            .or_default()
            .push(concept.clone());
    }
    let mut cells = BTreeMap::new();
    for record in records {
        for (concept_type, list) in &by_type {
            cells.insert((record.id.clone(), *concept_type), list.clone());
        }
    }
    cells
}
