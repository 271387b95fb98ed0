//! Innovation corpus loading, validation, and persistence.
//!
//! A corpus is an ordered list of curated bio-inspired design records, each
//! pairing a problem description (benefits, applications, challenge) with a
//! successful solution (innovation) and the biological mechanism behind it
//! (biomimicry). Two on-disk formats are supported: a JSON array and a CSV
//! table with `"; "`-separated keyword cells.
//!
//! Loading is deliberately permissive about optional content: records with an
//! empty challenge are accepted here and filtered later by the dataset
//! builders that need one. Structural problems (empty innovation text, empty
//! keywords, duplicate ids) fail the load.

use std::fmt;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

/// One curated innovation sample.
///
/// `benefits` and `applications` are keyword lists; `challenge`,
/// `innovation`, and `biomimicry` are free text. The challenge may be empty,
/// everything else is required to be non-empty after trimming.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnovationRecord {
    pub id: String,
    pub benefits: Vec<String>,
    pub applications: Vec<String>,
    pub challenge: String,
    pub innovation: String,
    pub biomimicry: String,
}

impl InnovationRecord {
    /// Trims leading and trailing whitespace from every field, preserving
    /// internal whitespace.
    fn normalize(&mut self) {
        fn trim(s: &mut String) {
            let t = s.trim();
            if t.len() != s.len() {
                *s = t.to_string();
            }
        }
        trim(&mut self.id);
        for k in &mut self.benefits {
            trim(k);
        }
        for k in &mut self.applications {
            trim(k);
        }
        trim(&mut self.challenge);
        trim(&mut self.innovation);
        trim(&mut self.biomimicry);
    }
}

/// A loaded corpus: the records in file order plus load provenance.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub records: Vec<InnovationRecord>,
    pub source_path: String,
    /// Unix seconds at load time. Provenance only; never serialized.
    pub loaded_at: i64,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// On-disk corpus encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Json,
    Csv,
}

impl CorpusFormat {
    /// Guesses the format from a file extension; `None` when unrecognized.
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "json" => Some(CorpusFormat::Json),
            "csv" => Some(CorpusFormat::Csv),
            _ => None,
        }
    }
}

/// A single failed validation rule on one record field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid record {record_id}: {reason}")]
    Validation { record_id: String, reason: String },
}

const CSV_HEADER: [&str; 6] = [
    "id",
    "benefits",
    "applications",
    "challenge",
    "innovation",
    "biomimicry",
];

/// Separator between keywords inside a CSV list cell.
const LIST_SEPARATOR: &str = "; ";

/// Checks one record against the field rules.
///
/// Returns every violation rather than stopping at the first, so callers can
/// report a complete picture. An empty vector means the record is valid. The
/// challenge field is intentionally not checked: records without one are
/// legal and are filtered downstream by builders that need it.
pub fn validate_record(record: &InnovationRecord) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut require = |field: &str, ok: bool, rule: &str| {
        if !ok {
            violations.push(Violation {
                field: field.to_string(),
                rule: rule.to_string(),
            });
        }
    };
    require("id", !record.id.trim().is_empty(), "must be non-empty");
    require(
        "innovation",
        !record.innovation.trim().is_empty(),
        "must be non-empty",
    );
    require(
        "biomimicry",
        !record.biomimicry.trim().is_empty(),
        "must be non-empty",
    );
    for (i, k) in record.benefits.iter().enumerate() {
        if k.trim().is_empty() {
            violations.push(Violation {
                field: format!("benefits[{i}]"),
                rule: "keyword must be non-empty".to_string(),
            });
        }
    }
    for (i, k) in record.applications.iter().enumerate() {
        if k.trim().is_empty() {
            violations.push(Violation {
                field: format!("applications[{i}]"),
                rule: "keyword must be non-empty".to_string(),
            });
        }
    }
    violations
}

/// Loads a corpus file, normalizes whitespace, and validates every record.
///
/// Record order is preserved exactly as on disk. Fails with `Parse` when the
/// file is syntactically broken or contains no records, and with
/// `Validation` (naming the first offending record) when a record breaks a
/// field rule or reuses an id.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    let raw = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut records = match format {
        CorpusFormat::Json => parse_json(&raw)?,
        CorpusFormat::Csv => parse_csv(&raw)?,
    };
    if records.is_empty() {
        return Err(CorpusError::Parse {
            line: 1,
            message: "corpus contains no records".to_string(),
        });
    }
    for record in &mut records {
        record.normalize();
    }
    let mut seen = std::collections::HashSet::new();
    for record in &records {
        let violations = validate_record(record);
        if let Some(first) = violations.first() {
            return Err(CorpusError::Validation {
                record_id: record.id.clone(),
                reason: first.to_string(),
            });
        }
        if !seen.insert(record.id.clone()) {
            return Err(CorpusError::Validation {
                record_id: record.id.clone(),
                reason: "duplicate id".to_string(),
            });
        }
    }
    Ok(Corpus {
        records,
        source_path: path.display().to_string(),
        loaded_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0),
    })
}

/// Writes the records back to disk in the requested format.
///
/// Serialization is deterministic, so `save -> load -> save` reproduces the
/// file byte for byte.
pub fn save_corpus(
    records: &[InnovationRecord],
    path: &Path,
    format: CorpusFormat,
) -> Result<(), CorpusError> {
    let contents = match format {
        CorpusFormat::Json => {
            let mut s = serde_json::to_string_pretty(records).map_err(|e| CorpusError::Parse {
                line: 0,
                message: e.to_string(),
            })?;
            s.push('\n');
            s
        }
        CorpusFormat::Csv => encode_csv(records)?,
    };
    std::fs::write(path, contents).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn parse_json(raw: &str) -> Result<Vec<InnovationRecord>, CorpusError> {
    serde_json::from_str(raw).map_err(|e| CorpusError::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

fn parse_csv(raw: &str) -> Result<Vec<InnovationRecord>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(raw.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| csv_error(&e))?
        .iter()
        .map(str::to_string)
        .collect::<Vec<_>>();
    if headers != CSV_HEADER {
        return Err(CorpusError::Parse {
            line: 1,
            message: format!(
                "expected header {:?}, found {:?}",
                CSV_HEADER.join(","),
                headers.join(",")
            ),
        });
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| csv_error(&e))?;
        let line = row.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| -> Result<&str, CorpusError> {
            row.get(i).ok_or(CorpusError::Parse {
                line,
                message: format!("missing column {}", CSV_HEADER[i]),
            })
        };
        records.push(InnovationRecord {
            id: field(0)?.to_string(),
            benefits: split_list(field(1)?),
            applications: split_list(field(2)?),
            challenge: field(3)?.to_string(),
            innovation: field(4)?.to_string(),
            biomimicry: field(5)?.to_string(),
        });
    }
    Ok(records)
}

fn encode_csv(records: &[InnovationRecord]) -> Result<String, CorpusError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CorpusError::Parse {
        line: 0,
        message: e.to_string(),
    };
    writer.write_record(CSV_HEADER).map_err(io_err)?;
    for r in records {
        writer
            .write_record([
                r.id.as_str(),
                &r.benefits.join(LIST_SEPARATOR),
                &r.applications.join(LIST_SEPARATOR),
                r.challenge.as_str(),
                r.innovation.as_str(),
                r.biomimicry.as_str(),
            ])
            .map_err(io_err)?;
    }
    let bytes = writer.into_inner().map_err(|e| CorpusError::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    String::from_utf8(bytes).map_err(|e| CorpusError::Parse {
        line: 0,
        message: e.to_string(),
    })
}

fn csv_error(e: &csv::Error) -> CorpusError {
    let line = match e.position() {
        Some(p) => p.line() as usize,
        None => 0,
    };
    CorpusError::Parse {
        line,
        message: e.to_string(),
    }
}

fn split_list(cell: &str) -> Vec<String> {
    if cell.is_empty() {
        return Vec::new();
    }
    cell.split(LIST_SEPARATOR).map(str::to_string).collect()
}
