//! Semantic-diversity measurement for generated concepts.
//!
//! The pipeline's final analysis step: embed innovation texts as normalized
//! bag-of-words distributions over word vectors ([`nbow`]), measure pairwise
//! semantic distance as the exact minimum-cost transport between those
//! distributions ([`solver`]), and summarize how far each generator strays
//! from its seed sample compared to a baseline group of existing innovations
//! ([`diversity_report`]). Larger distances mean the generator wandered
//! further from the seed — more diverse output.
//!
//! [`run_experiment`] drives the whole loop: for every seed sample and every
//! problem-spec type it generates a batch of concepts, then reports distance
//! distributions per (sample, type) cell alongside the baseline distribution
//! of each sample against its peer innovations.

pub mod embeddings;
pub mod nbow;
pub mod solver;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::backend::Backend;
use crate::concept::{
    generate_concepts, ConceptError, ConceptType, GeneratedConcept, GenerationParams, ProblemSpec,
};
use crate::corpus::InnovationRecord;

pub use embeddings::{EmbeddingFormat, EmbeddingStore};
pub use nbow::{to_nbow, NBowDocument, MAX_DOCUMENT_TOKENS};
pub use solver::{
    solve_transport, wmd, wmd_matrix, wmd_with_metric, GroundMetric, TransportPlan,
    MAX_SOLVER_ITERATIONS,
};

/// Errors from embedding loading, document construction, transport solving,
/// and report assembly.
#[derive(Debug, Error)]
pub enum DiversityError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed embedding data at byte {offset}: {message}")]
    Format { offset: u64, message: String },
    #[error("embedding dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("duplicate token {token:?} in embedding input")]
    DuplicateToken { token: String },
    #[error("document is empty after preprocessing")]
    DocumentEmpty,
    #[error("document has {unique} unique tokens, above the {limit}-token cap")]
    DocumentTooLarge { unique: usize, limit: usize },
    #[error("token {token:?} is not in the embedding store")]
    TokenMissing { token: String },
    #[error("transport solver failed: {detail}")]
    SolverFailure { detail: String },
    #[error("distance for pair ({row}, {col}) failed")]
    Pair {
        row: usize,
        col: usize,
        #[source]
        source: Box<DiversityError>,
    },
    #[error("document for {id:?} is unusable")]
    Document {
        id: String,
        #[source]
        source: Box<DiversityError>,
    },
    #[error("seed sample {id:?} is not in the baseline pool")]
    SampleNotInPool { id: String },
    #[error("seed sample {id:?} has no usable {concept_type} problem spec: {reason}")]
    SeedSpec {
        id: String,
        concept_type: ConceptType,
        reason: String,
    },
    #[error("generation for sample {sample:?} ({concept_type}) failed")]
    Generation {
        sample: String,
        concept_type: ConceptType,
        #[source]
        source: Box<ConceptError>,
    },
}

/// Five-number summary plus mean. Quartiles interpolate linearly between
/// order statistics (the `h = (n−1)p` convention).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SummaryStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Summary statistics of `values`, or `None` when empty.
pub fn summary_stats(values: &[f64]) -> Option<SummaryStats> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("distances are never NaN"));
    let quantile = |p: f64| -> f64 {
        let h = (sorted.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        if lo + 1 < sorted.len() {
            sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
        } else {
            sorted[lo]
        }
    };
    Some(SummaryStats {
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: sorted[sorted.len() - 1],
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
    })
}

/// Bin count used for distance histograms in report artifacts.
pub const HISTOGRAM_BINS: usize = 20;

/// Distance counts for one histogram over an automatically chosen range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

/// Fixed-width histogram of `values` over their own `[min, max]` range, or
/// `None` when empty. A degenerate range (all values equal) puts everything
/// in the first bin.
pub fn histogram(values: &[f64], bins: usize) -> Option<Histogram> {
    assert!(bins > 0, "histogram needs at least one bin");
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if values.is_empty() {
        return None;
    }
    let mut counts = vec![0usize; bins];
    let width = hi - lo;
    for &v in values {
        let bin = if width > 0.0 {
            (((v - lo) / width) * bins as f64) as usize
        } else {
            0
        };
        counts[bin.min(bins - 1)] += 1;
    }
    Some(Histogram { lo, hi, counts })
}

/// Distances from one seed sample to every concept one generator produced
/// for it.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityCell {
    pub sample_id: String,
    pub concept_type: ConceptType,
    /// `(concept id, distance)` in generation order.
    pub distances: Vec<(String, f64)>,
    /// Concept ids whose innovation text was empty after preprocessing;
    /// excluded from `distances` but reported so nothing vanishes silently.
    pub skipped: Vec<String>,
    /// `None` when every concept was skipped.
    pub summary: Option<SummaryStats>,
}

/// Distances from one seed sample to every *other* innovation in the
/// baseline pool — the yardstick a generator's cells are read against.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineRow {
    pub sample_id: String,
    /// `(pool record id, distance)` in pool order.
    pub distances: Vec<(String, f64)>,
    pub skipped: Vec<String>,
    pub summary: Option<SummaryStats>,
}

/// Per-(sample, type) distance distributions plus per-sample baselines.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport {
    /// One cell per (seed sample, concept type) with generated concepts,
    /// ordered by seed position then type.
    pub cells: Vec<DiversityCell>,
    /// One row per seed sample, in seed order.
    pub baselines: Vec<BaselineRow>,
}

/// One row of the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub sample_id: String,
    /// Generator type for generated cells; absent on baseline rows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concept_type: Option<String>,
    pub count: usize,
    pub skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stats: Option<SummaryStats>,
}

/// Statistics-only view of a report, for JSON export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportSummary {
    pub generated: Vec<CellSummary>,
    pub baseline: Vec<CellSummary>,
}

impl DiversityReport {
    /// Total number of generated-concept distances across all cells.
    pub fn total_generated(&self) -> usize {
        self.cells.iter().map(|c| c.distances.len()).sum()
    }

    /// Total number of baseline distances across all samples.
    pub fn total_baseline(&self) -> usize {
        self.baselines.iter().map(|b| b.distances.len()).sum()
    }

    /// Every distance in the report: generated cells first, then baselines,
    /// both in report order.
    pub fn all_distances(&self) -> Vec<f64> {
        self.cells
            .iter()
            .flat_map(|c| c.distances.iter().map(|(_, d)| *d))
            .chain(
                self.baselines
                    .iter()
                    .flat_map(|b| b.distances.iter().map(|(_, d)| *d)),
            )
            .collect()
    }

    /// Raw distances as CSV: `sample,type,concept_id,distance`, generated
    /// cells first (type = generator slug), then baseline rows with type
    /// `baseline` and the peer record id in the concept column.
    pub fn to_distances_csv(&self) -> String {
        let mut out = String::from("sample,type,concept_id,distance\n");
        for cell in &self.cells {
            for (id, d) in &cell.distances {
                out.push_str(&format!(
                    "{},{},{},{:.9}\n",
                    cell.sample_id,
                    cell.concept_type.slug(),
                    id,
                    d
                ));
            }
        }
        for row in &self.baselines {
            for (id, d) in &row.distances {
                out.push_str(&format!("{},baseline,{},{:.9}\n", row.sample_id, id, d));
            }
        }
        out
    }

    /// Statistics-only summary for JSON export.
    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            generated: self
                .cells
                .iter()
                .map(|c| CellSummary {
                    sample_id: c.sample_id.clone(),
                    concept_type: Some(c.concept_type.slug().to_owned()),
                    count: c.distances.len(),
                    skipped: c.skipped.len(),
                    stats: c.summary,
                })
                .collect(),
            baseline: self
                .baselines
                .iter()
                .map(|b| CellSummary {
                    sample_id: b.sample_id.clone(),
                    concept_type: None,
                    count: b.distances.len(),
                    skipped: b.skipped.len(),
                    stats: b.summary,
                })
                .collect(),
        }
    }

    /// Histogram of every distance in the report, range chosen from the
    /// data. `None` when the report holds no distances.
    pub fn histogram(&self, bins: usize) -> Option<Histogram> {
        histogram(&self.all_distances(), bins)
    }
}

/// Ids kept, their nBOW documents, and ids skipped for empty text.
type PreparedDocuments = (Vec<String>, Vec<NBowDocument>, Vec<String>);

/// Builds nBOW documents for `(id, text)` pairs. Empty documents go to
/// `skipped`; any other failure is fatal, tagged with the offending id.
fn documents_for<'a>(
    items: impl Iterator<Item = (&'a str, &'a str)>,
    store: &EmbeddingStore,
    stopwords: &BTreeSet<String>,
) -> Result<PreparedDocuments, DiversityError> {
    let mut ids = Vec::new();
    let mut docs = Vec::new();
    let mut skipped = Vec::new();
    for (id, text) in items {
        match to_nbow(text, store, stopwords) {
            Ok(doc) => {
                ids.push(id.to_owned());
                docs.push(doc);
            }
            Err(DiversityError::DocumentEmpty) => skipped.push(id.to_owned()),
            Err(other) => {
                return Err(DiversityError::Document {
                    id: id.to_owned(),
                    source: Box::new(other),
                })
            }
        }
    }
    Ok((ids, docs, skipped))
}

/// Distances from `seed_doc` to every document, re-tagging any per-pair
/// failure with the target document's id.
fn distances_from(
    seed_doc: &NBowDocument,
    ids: Vec<String>,
    docs: &[NBowDocument],
    store: &EmbeddingStore,
) -> Result<Vec<(String, f64)>, DiversityError> {
    let matrix = wmd_matrix(std::slice::from_ref(seed_doc), docs, store).map_err(|e| match e {
        DiversityError::Pair { col, source, .. } => DiversityError::Document {
            id: ids[col].clone(),
            source,
        },
        other => other,
    })?;
    let row = matrix.into_iter().next().expect("one seed row");
    Ok(ids.into_iter().zip(row).collect())
}

/// Measures every generated concept and every baseline peer against its seed
/// sample's original innovation text.
///
/// `generated` maps `(seed sample id, concept type)` to that cell's concepts.
/// Cells appear in the report ordered by seed position then concept type;
/// seeds or cells absent from the map are simply omitted. Each seed must
/// appear in `baseline_pool` (by id) and is excluded from its own baseline
/// row. Concepts whose innovation text dies in preprocessing are recorded in
/// the cell's `skipped` list rather than failing the report.
pub fn diversity_report(
    originals: &[InnovationRecord],
    generated: &BTreeMap<(String, ConceptType), Vec<GeneratedConcept>>,
    baseline_pool: &[InnovationRecord],
    store: &EmbeddingStore,
    stopwords: &BTreeSet<String>,
) -> Result<DiversityReport, DiversityError> {
    let mut cells = Vec::new();
    let mut baselines = Vec::new();
    for original in originals {
        let seed_doc =
            to_nbow(&original.innovation, store, stopwords).map_err(|e| {
                DiversityError::Document {
                    id: original.id.clone(),
                    source: Box::new(e),
                }
            })?;

        for concept_type in ConceptType::ALL {
            let Some(concepts) = generated.get(&(original.id.clone(), concept_type)) else {
                continue;
            };
            let (ids, docs, skipped) = documents_for(
                concepts
                    .iter()
                    .map(|c| (c.id.as_str(), c.innovation.as_str())),
                store,
                stopwords,
            )?;
            let distances = distances_from(&seed_doc, ids, &docs, store)?;
            let values: Vec<f64> = distances.iter().map(|(_, d)| *d).collect();
            cells.push(DiversityCell {
                sample_id: original.id.clone(),
                concept_type,
                summary: summary_stats(&values),
                distances,
                skipped,
            });
        }

        if !baseline_pool.iter().any(|r| r.id == original.id) {
            return Err(DiversityError::SampleNotInPool {
                id: original.id.clone(),
            });
        }
        let (ids, docs, skipped) = documents_for(
            baseline_pool
                .iter()
                .filter(|r| r.id != original.id)
                .map(|r| (r.id.as_str(), r.innovation.as_str())),
            store,
            stopwords,
        )?;
        let distances = distances_from(&seed_doc, ids, &docs, store)?;
        let values: Vec<f64> = distances.iter().map(|(_, d)| *d).collect();
        baselines.push(BaselineRow {
            sample_id: original.id.clone(),
            summary: summary_stats(&values),
            distances,
            skipped,
        });
    }
    Ok(DiversityReport { cells, baselines })
}

/// Model ids for the three generator types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorModels {
    pub type1: String,
    pub type2: String,
    pub type3: String,
}

impl GeneratorModels {
    /// The deterministic mock backend's standard generator ids.
    pub fn mock_defaults() -> Self {
        GeneratorModels {
            type1: "mock/gen1".into(),
            type2: "mock/gen2".into(),
            type3: "mock/gen3".into(),
        }
    }

    pub fn for_type(&self, concept_type: ConceptType) -> &str {
        match concept_type {
            ConceptType::Type1 => &self.type1,
            ConceptType::Type2 => &self.type2,
            ConceptType::Type3 => &self.type3,
        }
    }
}

/// Shape and sampling knobs of a full diversity experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Concepts generated per (seed sample, type) cell.
    pub concepts_per_cell: usize,
    pub models: GeneratorModels,
    pub temperature: f64,
    pub max_tokens: usize,
    /// Sampling budget per cell; `None` means twice `concepts_per_cell`.
    pub budget: Option<usize>,
    /// Logical timestamp stamped on generated concepts.
    pub created_at: i64,
}

impl ExperimentConfig {
    pub fn new(concepts_per_cell: usize, models: GeneratorModels) -> Self {
        ExperimentConfig {
            concepts_per_cell,
            models,
            temperature: crate::backend::DEFAULT_GENERATION_TEMPERATURE,
            max_tokens: crate::backend::DEFAULT_MAX_TOKENS,
            budget: None,
            created_at: 0,
        }
    }

    /// The reference experiment shape: 50 concepts per cell.
    pub fn full_scale(models: GeneratorModels) -> Self {
        Self::new(50, models)
    }
}

/// Everything a finished experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: DiversityReport,
    /// Generated concepts per (seed sample id, type), for persistence.
    pub concepts: BTreeMap<(String, ConceptType), Vec<GeneratedConcept>>,
}

/// Builds the problem spec a seed sample poses for one generator type.
fn spec_for_seed(
    seed: &InnovationRecord,
    concept_type: ConceptType,
) -> Result<ProblemSpec, DiversityError> {
    let fail = |reason: &str| DiversityError::SeedSpec {
        id: seed.id.clone(),
        concept_type,
        reason: reason.to_owned(),
    };
    let spec = match concept_type {
        ConceptType::Type1 => {
            if seed.applications.is_empty() {
                return Err(fail("record has no applications"));
            }
            ProblemSpec::Type1 {
                applications: seed.applications.clone(),
            }
        }
        ConceptType::Type2 => {
            if seed.benefits.is_empty() {
                return Err(fail("record has no benefits"));
            }
            if seed.applications.is_empty() {
                return Err(fail("record has no applications"));
            }
            ProblemSpec::Type2 {
                benefits: seed.benefits.clone(),
                applications: seed.applications.clone(),
            }
        }
        ConceptType::Type3 => {
            if seed.challenge.trim().is_empty() {
                return Err(fail("record has no challenge"));
            }
            ProblemSpec::Type3 {
                challenge: seed.challenge.clone(),
            }
        }
    };
    Ok(spec)
}

/// Runs the full diversity experiment: for every seed sample × generator
/// type, generates `concepts_per_cell` concepts through `backend`, then
/// reports distance distributions against the seeds and the baseline pool.
pub fn run_experiment(
    seeds: &[InnovationRecord],
    baseline_pool: &[InnovationRecord],
    backend: &dyn Backend,
    store: &EmbeddingStore,
    stopwords: &BTreeSet<String>,
    config: &ExperimentConfig,
) -> Result<ExperimentOutcome, DiversityError> {
    let mut concepts: BTreeMap<(String, ConceptType), Vec<GeneratedConcept>> = BTreeMap::new();
    for seed in seeds {
        for concept_type in ConceptType::ALL {
            let spec = spec_for_seed(seed, concept_type)?;
            let mut params = GenerationParams::new(config.models.for_type(concept_type));
            params.temperature = config.temperature;
            params.max_tokens = config.max_tokens;
            params.budget = config.budget;
            params.created_at = config.created_at;
            params.id_prefix = Some(format!("{}-{}", seed.id, concept_type.slug()));
            let outcome = generate_concepts(&spec, config.concepts_per_cell, backend, &params)
                .map_err(|e| DiversityError::Generation {
                    sample: seed.id.clone(),
                    concept_type,
                    source: Box::new(e),
                })?;
            concepts.insert((seed.id.clone(), concept_type), outcome.concepts);
        }
    }
    let report = diversity_report(seeds, &concepts, baseline_pool, store, stopwords)?;
    Ok(ExperimentOutcome { report, concepts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::MockBackend;

    #[test]
    fn summary_stats_interpolates_quartiles() {
        let stats = summary_stats(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(stats.min, 1.0);
        assert_eq!(stats.q1, 1.75);
        assert_eq!(stats.median, 2.5);
        assert_eq!(stats.q3, 3.25);
        assert_eq!(stats.max, 4.0);
        assert_eq!(stats.mean, 2.5);
    }

    #[test]
    fn summary_stats_handles_edges() {
        assert!(summary_stats(&[]).is_none());
        let single = summary_stats(&[7.0]).unwrap();
        assert_eq!(
            (single.min, single.q1, single.median, single.q3, single.max, single.mean),
            (7.0, 7.0, 7.0, 7.0, 7.0, 7.0)
        );
    }

    #[test]
    fn histogram_bins_cover_the_range() {
        let h = histogram(&[0.0, 0.5, 1.0, 1.0], 2).unwrap();
        assert_eq!((h.lo, h.hi), (0.0, 1.0));
        assert_eq!(h.counts, vec![1, 3]);

        let flat = histogram(&[2.0, 2.0, 2.0], 4).unwrap();
        assert_eq!(flat.counts, vec![3, 0, 0, 0]);

        assert!(histogram(&[], 20).is_none());
    }

    fn record(id: &str, innovation: &str) -> InnovationRecord {
        InnovationRecord {
            id: id.to_owned(),
            benefits: vec!["lightweight".into()],
            applications: vec!["drones".into()],
            challenge: format!("Improving {innovation} is hard."),
            innovation: innovation.to_owned(),
            biomimicry: format!("A mechanism behind {innovation}."),
        }
    }

    /// Store with one axis-aligned unit vector per token, scaled so all
    /// pairwise distances are hand-computable.
    fn axis_store(tokens: &[&str]) -> EmbeddingStore {
        let dim = tokens.len();
        EmbeddingStore::from_entries(tokens.iter().enumerate().map(|(i, t)| {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            ((*t).to_owned(), v)
        }))
        .expect("valid store")
    }

    #[test]
    fn report_measures_cells_and_baseline_by_hand() {
        // Single-token innovations on orthogonal unit vectors: every
        // cross-token distance is exactly √2.
        let seed = record("seed", "alpha");
        let peer_b = record("peer-b", "beta");
        let peer_c = record("peer-c", "gamma");
        let pool = vec![seed.clone(), peer_b, peer_c];
        let store = axis_store(&["alpha", "beta", "gamma", "delta"]);
        let stopwords = BTreeSet::new();

        let concept = |id: &str, innovation: &str| GeneratedConcept {
            id: id.to_owned(),
            spec: ProblemSpec::Type1 {
                applications: vec!["drones".into()],
            },
            biomimicry: "mechanism".into(),
            innovation: innovation.to_owned(),
            raw_completion: String::new(),
            model: "mock/gen1".into(),
            temperature: 0.9,
            created_at: 0,
            source_category: None,
        };
        let mut generated = BTreeMap::new();
        generated.insert(
            ("seed".to_owned(), ConceptType::Type1),
            vec![
                concept("c-0", "delta"),
                concept("c-1", "alpha"),
                concept("c-2", "!!"), // dies in preprocessing → skipped
            ],
        );

        let report =
            diversity_report(&[seed], &generated, &pool, &store, &stopwords).unwrap();

        assert_eq!(report.cells.len(), 1);
        let cell = &report.cells[0];
        assert_eq!(cell.sample_id, "seed");
        assert_eq!(cell.concept_type, ConceptType::Type1);
        assert_eq!(cell.skipped, vec!["c-2".to_owned()]);
        let sqrt2 = 2.0f64.sqrt();
        assert_eq!(cell.distances.len(), 2);
        assert_eq!(cell.distances[0].0, "c-0");
        assert!((cell.distances[0].1 - sqrt2).abs() <= 1e-12);
        assert_eq!(cell.distances[1], ("c-1".to_owned(), 0.0));
        let stats = cell.summary.unwrap();
        assert_eq!(stats.min, 0.0);
        assert!((stats.max - sqrt2).abs() <= 1e-12);

        assert_eq!(report.baselines.len(), 1);
        let baseline = &report.baselines[0];
        assert_eq!(baseline.distances.len(), 2, "self excluded from pool");
        for (_, d) in &baseline.distances {
            assert!((d - sqrt2).abs() <= 1e-12);
        }
        assert_eq!(report.total_generated(), 2);
        assert_eq!(report.total_baseline(), 2);

        let csv = report.to_distances_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "sample,type,concept_id,distance");
        assert_eq!(lines[1], format!("seed,type1,c-0,{sqrt2:.9}"));
        assert_eq!(lines[2], "seed,type1,c-1,0.000000000");
        assert_eq!(lines[3], format!("seed,baseline,peer-b,{sqrt2:.9}"));
        assert_eq!(lines.len(), 5);

        let summary = report.summary();
        assert_eq!(summary.generated.len(), 1);
        assert_eq!(summary.generated[0].count, 2);
        assert_eq!(summary.generated[0].skipped, 1);
        assert_eq!(summary.generated[0].concept_type.as_deref(), Some("type1"));
        assert_eq!(summary.baseline[0].concept_type, None);

        let hist = report.histogram(2).unwrap();
        assert_eq!(hist.counts.iter().sum::<usize>(), 4);
        assert_eq!(hist.counts[0], 1); // the lone zero distance
    }

    #[test]
    fn seed_missing_from_pool_is_an_error() {
        let seed = record("seed", "alpha");
        let pool = vec![record("other", "beta")];
        let store = axis_store(&["alpha", "beta"]);
        let err = diversity_report(
            std::slice::from_ref(&seed),
            &BTreeMap::new(),
            &pool,
            &store,
            &BTreeSet::new(),
        )
        .unwrap_err();
        assert!(matches!(err, DiversityError::SampleNotInPool { id } if id == "seed"));
    }

    #[test]
    fn pool_of_only_the_sample_gives_an_empty_baseline() {
        let seed = record("seed", "alpha");
        let pool = vec![seed.clone()];
        let store = axis_store(&["alpha"]);
        let report = diversity_report(
            &[seed],
            &BTreeMap::new(),
            &pool,
            &store,
            &BTreeSet::new(),
        )
        .unwrap();
        assert_eq!(report.cells.len(), 0);
        assert_eq!(report.baselines.len(), 1);
        assert!(report.baselines[0].distances.is_empty());
        assert!(report.baselines[0].summary.is_none());
        assert!(report.histogram(20).is_none());
    }

    #[test]
    fn unreadable_seed_document_is_fatal_with_the_seed_id() {
        let seed = record("seed", "!!");
        let pool = vec![seed.clone()];
        let store = axis_store(&["alpha"]);
        let err = diversity_report(
            &[seed],
            &BTreeMap::new(),
            &pool,
            &store,
            &BTreeSet::new(),
        )
        .unwrap_err();
        match err {
            DiversityError::Document { id, source } => {
                assert_eq!(id, "seed");
                assert!(matches!(*source, DiversityError::DocumentEmpty));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn mock_experiment_has_the_configured_shape() {
        // Three fully-populated seeds, pool = the same three records, two
        // concepts per cell: 3 seeds × 3 types × 2 = 18 generated distances
        // and 3 × 2 = 6 baseline distances.
        let seeds = vec![
            record("robot-a", "alpha beta"),
            record("robot-b", "beta gamma"),
            record("robot-c", "gamma alpha"),
        ];
        let backend = MockBackend::with_standard_models(seeds.clone(), 7);
        // Vocabulary covers every innovation AND the mock's completions,
        // which echo corpus records; one store handles both.
        let store = axis_store(&["alpha", "beta", "gamma"]);
        let config = ExperimentConfig::new(2, GeneratorModels::mock_defaults());

        let outcome = run_experiment(
            &seeds,
            &seeds,
            &backend,
            &store,
            &BTreeSet::new(),
            &config,
        )
        .unwrap();

        assert_eq!(outcome.concepts.len(), 9);
        assert!(outcome
            .concepts
            .values()
            .all(|cell| cell.len() == 2));
        let report = &outcome.report;
        assert_eq!(report.cells.len(), 9);
        assert_eq!(report.total_generated(), 18);
        assert_eq!(report.total_baseline(), 6);
        assert!(report.all_distances().iter().all(|&d| d >= 0.0));
        // Cells come out ordered by seed position then type.
        assert_eq!(report.cells[0].sample_id, "robot-a");
        assert_eq!(report.cells[0].concept_type, ConceptType::Type1);
        assert_eq!(report.cells[8].sample_id, "robot-c");
        assert_eq!(report.cells[8].concept_type, ConceptType::Type3);

        // Determinism: the same run yields byte-identical CSV.
        let again = run_experiment(
            &seeds,
            &seeds,
            &backend,
            &store,
            &BTreeSet::new(),
            &config,
        )
        .unwrap();
        assert_eq!(
            again.report.to_distances_csv(),
            report.to_distances_csv()
        );
    }

    #[test]
    fn seed_without_a_field_fails_with_a_named_spec_error() {
        let mut seed = record("seed", "alpha");
        seed.challenge = String::new();
        let backend = MockBackend::with_standard_models(vec![record("r", "alpha")], 1);
        let store = axis_store(&["alpha"]);
        let config = ExperimentConfig::new(1, GeneratorModels::mock_defaults());
        let err = run_experiment(
            &[seed.clone()],
            &[seed],
            &backend,
            &store,
            &BTreeSet::new(),
            &config,
        )
        .unwrap_err();
        match err {
            DiversityError::SeedSpec {
                id, concept_type, ..
            } => {
                assert_eq!(id, "seed");
                assert_eq!(concept_type, ConceptType::Type3);
            }
            other => panic!("unexpected error: {other}"),
        }
    }
}
