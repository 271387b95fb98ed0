//! `ratings`: aggregates human feasibility/novelty scores per generator type
//! and per concept.
//!
//! Input CSV schema: `concept_id,rater_id,feasibility,novelty` with integer
//! scores in 1–5. Concept ids are resolved to generator types through a
//! concept store.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use bidforge::concept::load_concepts;
use bidforge::ConceptType;
use serde::{Deserialize, Serialize};

use crate::config::PipelineConfig;
use crate::error::{io_error, CliError};
use crate::manifest::prepare_output;

/// The exact header the ratings CSV must carry.
pub const RATINGS_HEADER: [&str; 4] = ["concept_id", "rater_id", "feasibility", "novelty"];

/// One validated row.
#[derive(Debug, Clone, PartialEq, Eq)]
struct RatingRecord {
    concept_id: String,
    rater_id: String,
    feasibility: u8,
    novelty: u8,
}

/// Mean/min/max over one score dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreStats {
    pub mean: f64,
    pub min: u8,
    pub max: u8,
}

impl ScoreStats {
    fn over(scores: &[u8]) -> ScoreStats {
        let sum: u64 = scores.iter().map(|&s| s as u64).sum();
        ScoreStats {
            mean: sum as f64 / scores.len() as f64,
            min: *scores.iter().min().expect("non-empty"),
            max: *scores.iter().max().expect("non-empty"),
        }
    }
}

/// Aggregate scores for one generator type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeRatingSummary {
    pub concept_type: ConceptType,
    /// Distinct raters who scored at least one concept of this type.
    pub raters: usize,
    pub ratings: usize,
    pub feasibility: ScoreStats,
    pub novelty: ScoreStats,
}

/// Mean scores for one concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConceptRatingSummary {
    pub concept_id: String,
    pub concept_type: ConceptType,
    pub ratings: usize,
    pub feasibility_mean: f64,
    pub novelty_mean: f64,
}

/// What `ratings` produced, written to `<output>/ratings_summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingsReport {
    pub per_type: Vec<TypeRatingSummary>,
    pub per_concept: Vec<ConceptRatingSummary>,
    #[serde(skip)]
    pub output: PathBuf,
}

/// Parses and validates the ratings CSV, resolves each concept to its
/// generator type via `store`, and writes the aggregate summary.
pub fn cmd_ratings(
    config: &PipelineConfig,
    csv_path: &Path,
    store: &Path,
) -> Result<RatingsReport, CliError> {
    let records = parse_ratings_csv(csv_path)?;
    let concepts = load_concepts(store)?;
    let type_of: BTreeMap<&str, ConceptType> = concepts
        .iter()
        .map(|c| (c.id.as_str(), c.spec.concept_type()))
        .collect();

    for record in &records {
        if !type_of.contains_key(record.concept_id.as_str()) {
            return Err(CliError::UnknownConcept {
                id: record.concept_id.clone(),
            });
        }
    }

    // Per concept, in first-appearance order of the CSV.
    let mut concept_order: Vec<String> = Vec::new();
    let mut by_concept: BTreeMap<&str, Vec<&RatingRecord>> = BTreeMap::new();
    for record in &records {
        if !by_concept.contains_key(record.concept_id.as_str()) {
            concept_order.push(record.concept_id.clone());
        }
        by_concept
            .entry(record.concept_id.as_str())
            .or_default()
            .push(record);
    }
    let per_concept: Vec<ConceptRatingSummary> = concept_order
        .iter()
        .map(|id| {
            let rows = &by_concept[id.as_str()];
            let n = rows.len() as f64;
            ConceptRatingSummary {
                concept_id: id.clone(),
                concept_type: type_of[id.as_str()],
                ratings: rows.len(),
                feasibility_mean: rows.iter().map(|r| r.feasibility as f64).sum::<f64>() / n,
                novelty_mean: rows.iter().map(|r| r.novelty as f64).sum::<f64>() / n,
            }
        })
        .collect();

    // Per type, in type order, only for types that received ratings.
    let mut per_type = Vec::new();
    for concept_type in ConceptType::ALL {
        let rows: Vec<&RatingRecord> = records
            .iter()
            .filter(|r| type_of[r.concept_id.as_str()] == concept_type)
            .collect();
        if rows.is_empty() {
            continue;
        }
        let raters: BTreeSet<&str> = rows.iter().map(|r| r.rater_id.as_str()).collect();
        let feasibility: Vec<u8> = rows.iter().map(|r| r.feasibility).collect();
        let novelty: Vec<u8> = rows.iter().map(|r| r.novelty).collect();
        per_type.push(TypeRatingSummary {
            concept_type,
            raters: raters.len(),
            ratings: rows.len(),
            feasibility: ScoreStats::over(&feasibility),
            novelty: ScoreStats::over(&novelty),
        });
    }

    let output = prepare_output(&config.output_dir, "ratings_summary.json")?;
    let report = RatingsReport {
        per_type,
        per_concept,
        output: output.clone(),
    };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&output, json + "\n").map_err(|source| io_error(&output, source))?;
    Ok(report)
}

fn parse_ratings_csv(path: &Path) -> Result<Vec<RatingRecord>, CliError> {
    let file = std::fs::File::open(path).map_err(|source| io_error(path, source))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers = reader.headers().map_err(|e| CliError::RatingsSchema {
        line: 1,
        message: e.to_string(),
    })?;
    let found: Vec<&str> = headers.iter().collect();
    if found != RATINGS_HEADER {
        return Err(CliError::RatingsSchema {
            line: 1,
            message: format!(
                "expected header {:?}, found {:?}",
                RATINGS_HEADER.join(","),
                found.join(",")
            ),
        });
    }

    let mut records = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::RatingsSchema {
            line: e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or_default(),
            message: e.to_string(),
        })?;
        let line_no = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or_default();
        if record.len() != 4 {
            return Err(CliError::RatingsSchema {
                line: line_no,
                message: format!("expected 4 fields, found {}", record.len()),
            });
        }
        let (concept_id, rater_id) = (&record[0], &record[1]);
        if concept_id.is_empty() || rater_id.is_empty() {
            return Err(CliError::RatingsSchema {
                line: line_no,
                message: "empty concept_id or rater_id".into(),
            });
        }
        let score = |name: &str, value: &str| -> Result<u8, CliError> {
            let parsed: u8 = value.parse().map_err(|_| CliError::RatingsSchema {
                line: line_no,
                message: format!("{name} {value:?} is not an integer"),
            })?;
            if !(1..=5).contains(&parsed) {
                return Err(CliError::RatingsSchema {
                    line: line_no,
                    message: format!("{name} {parsed} is outside 1\u{2013}5"),
                });
            }
            Ok(parsed)
        };
        records.push(RatingRecord {
            concept_id: concept_id.to_string(),
            rater_id: rater_id.to_string(),
            feasibility: score("feasibility", &record[2])?,
            novelty: score("novelty", &record[3])?,
        });
    }
    if records.is_empty() {
        return Err(CliError::RatingsSchema {
            line: 1,
            message: "no data rows".into(),
        });
    }
    Ok(records)
}
