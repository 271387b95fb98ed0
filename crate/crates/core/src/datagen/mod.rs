//! Fine-tuning dataset construction.
//!
//! From one corpus this module derives seven datasets: three concept
//! generators conditioned on progressively richer problem descriptions
//! (applications; benefits + applications; a full challenge statement), a
//! random-innovation generator used to synthesize negatives, and three
//! binary relevancy evaluators (nature–solution, and the benefits and
//! challenge sides of problem–solution).
//!
//! Evaluator datasets pair every eligible record's true innovation (label
//! `related`) with a generated innovation for the same problem inputs
//! (label `unrelated`), so the label classes stay exactly balanced.
//!
//! The corpus loader is permissive about missing optional content; builders
//! are the strict side of that bargain — each one skips records lacking a
//! field it needs and reports the skipped ids.

pub mod markers;
pub mod templates;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendError, CompletionRequest, Label};
use crate::corpus::InnovationRecord;

use markers::{find_marker, MarkerTag};

/// The seven fine-tuned model kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// Generator conditioned on applications.
    Gen1,
    /// Generator conditioned on benefits and applications.
    Gen2,
    /// Generator conditioned on a challenge statement.
    Gen3,
    /// Applications-conditioned generator of innovation text alone, used to
    /// produce negative evaluator examples.
    RandomInno,
    /// Nature–solution evaluator (biomimicry vs innovation).
    EvalBio,
    /// Problem–solution evaluator, benefits side (innovation vs benefits).
    EvalBen,
    /// Problem–solution evaluator, challenge side (challenge vs innovation).
    EvalCha,
}

impl ModelKind {
    pub const ALL: [ModelKind; 7] = [
        ModelKind::Gen1,
        ModelKind::Gen2,
        ModelKind::Gen3,
        ModelKind::RandomInno,
        ModelKind::EvalBio,
        ModelKind::EvalBen,
        ModelKind::EvalCha,
    ];

    pub fn is_generator(self) -> bool {
        matches!(
            self,
            ModelKind::Gen1 | ModelKind::Gen2 | ModelKind::Gen3 | ModelKind::RandomInno
        )
    }

    pub fn is_evaluator(self) -> bool {
        !self.is_generator()
    }

    /// Stable lowercase identifier, used in file names and manifests.
    pub fn slug(self) -> &'static str {
        match self {
            ModelKind::Gen1 => "gen1",
            ModelKind::Gen2 => "gen2",
            ModelKind::Gen3 => "gen3",
            ModelKind::RandomInno => "random_inno",
            ModelKind::EvalBio => "eval_bio",
            ModelKind::EvalBen => "eval_ben",
            ModelKind::EvalCha => "eval_cha",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

/// One prompt/completion pair.
///
/// Invariants, enforced by the builders: the prompt ends with the prompt
/// separator, the completion starts with a single space and ends with the
/// end marker, and `label` is present exactly for evaluator datasets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FineTuneExample {
    pub prompt: String,
    pub completion: String,
    pub label: Option<Label>,
    pub source_record_id: String,
}

/// A built dataset plus the records the builder had to skip.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBuild {
    pub kind: ModelKind,
    pub examples: Vec<FineTuneExample>,
    /// Ids of records missing a field this dataset needs.
    pub skipped: Vec<String>,
}

/// A dataset split into train and validation parts.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub kind: ModelKind,
    pub train: Vec<FineTuneExample>,
    pub validation: Vec<FineTuneExample>,
}

/// Split parameters: an exact train fraction and the shuffle seed.
///
/// The fraction is kept as a ratio so the per-stratum rounding is integer
/// arithmetic with no float edge cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitConfig {
    pub train_num: u32,
    pub train_den: u32,
    pub seed: u64,
}

impl SplitConfig {
    /// A validated config; the fraction must satisfy `0 < num/den < 1`.
    pub fn new(train_num: u32, train_den: u32, seed: u64) -> Result<Self, DatagenError> {
        if train_num == 0 || train_den == 0 || train_num >= train_den {
            return Err(DatagenError::InvalidSplitFraction {
                num: train_num,
                den: train_den,
            });
        }
        Ok(SplitConfig {
            train_num,
            train_den,
            seed,
        })
    }

    /// Train size for a stratum of `n`: `round(n * num/den)`, half up.
    fn train_count(&self, n: usize) -> usize {
        let num = self.train_num as u128;
        let den = self.train_den as u128;
        let n = n as u128;
        ((2 * num * n + den) / (2 * den)) as usize
    }
}

impl Default for SplitConfig {
    /// The 4:1 train/validation ratio with seed 0.
    fn default() -> Self {
        SplitConfig {
            train_num: 4,
            train_den: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DatagenError {
    #[error("cannot wrap empty text in markers")]
    EmptyText,
    #[error("expected text wrapped in {tag}, found {found:?}")]
    MalformedMarkers { tag: MarkerTag, found: String },
    #[error("record {record_id} contains the literal marker token {tag}")]
    MarkerCollision { record_id: String, tag: MarkerTag },
    #[error("no eligible records for dataset {kind}")]
    EmptyDataset { kind: ModelKind },
    #[error("no negative sample for record {record_id}")]
    MissingNegative { record_id: String },
    #[error("backend failed for record {record_id}: {source}")]
    Backend {
        record_id: String,
        source: BackendError,
    },
    #[error("backend returned an empty completion for record {record_id}")]
    EmptyCompletion { record_id: String },
    #[error("train fraction {num}/{den} must lie strictly between 0 and 1")]
    InvalidSplitFraction { num: u32, den: u32 },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad JSONL at line {line}: {message}")]
    Jsonl { line: usize, message: String },
}

/// Builds one of the four generator datasets.
///
/// Records missing a field the prompt needs (applications for `Gen1` and
/// `RandomInno`, benefits and applications for `Gen2`, a challenge for
/// `Gen3`) are skipped and reported in [`DatasetBuild::skipped`]. Panics if
/// called with an evaluator kind.
pub fn build_generator_dataset(
    records: &[InnovationRecord],
    kind: ModelKind,
) -> Result<DatasetBuild, DatagenError> {
    assert!(kind.is_generator(), "{kind} is not a generator kind");
    let mut examples = Vec::new();
    let mut skipped = Vec::new();
    for record in records {
        let prompt = match kind {
            ModelKind::Gen1 | ModelKind::RandomInno => {
                if record.applications.is_empty() {
                    None
                } else {
                    Some(templates::gen1_prompt(&record.applications))
                }
            }
            ModelKind::Gen2 => {
                if record.benefits.is_empty() || record.applications.is_empty() {
                    None
                } else {
                    Some(templates::gen2_prompt(&record.benefits, &record.applications))
                }
            }
            ModelKind::Gen3 => {
                if record.challenge.is_empty() {
                    None
                } else {
                    Some(templates::gen3_prompt(&record.challenge))
                }
            }
            _ => unreachable!(),
        };
        let Some(prompt) = prompt else {
            skipped.push(record.id.clone());
            continue;
        };
        let completion = if kind == ModelKind::RandomInno {
            templates::random_innovation_completion(&record.innovation)
        } else {
            templates::render_completion(record)
        };
        examples.push(FineTuneExample {
            prompt,
            completion,
            label: None,
            source_record_id: record.id.clone(),
        });
    }
    if examples.is_empty() {
        return Err(DatagenError::EmptyDataset { kind });
    }
    Ok(DatasetBuild {
        kind,
        examples,
        skipped,
    })
}

/// Generates one random innovation per record, conditioned only on the
/// record's applications, keyed by record id.
///
/// Calls may fan out concurrently; the result map and any surfaced error are
/// chosen deterministically (first failing record in corpus order).
pub fn build_negative_samples(
    records: &[InnovationRecord],
    backend: &dyn Backend,
    model: &str,
) -> Result<BTreeMap<String, String>, DatagenError> {
    let results: Vec<(String, Result<String, DatagenError>)> = records
        .par_iter()
        .map(|record| {
            let request =
                CompletionRequest::new(model, templates::gen1_prompt(&record.applications));
            let result = backend
                .complete(&request)
                .map_err(|source| DatagenError::Backend {
                    record_id: record.id.clone(),
                    source,
                })
                .and_then(|response| {
                    let text = response.texts.first().cloned().unwrap_or_default();
                    parse_innovation_text(&text).ok_or(DatagenError::EmptyCompletion {
                        record_id: record.id.clone(),
                    })
                });
            (record.id.clone(), result)
        })
        .collect();

    let mut negatives = BTreeMap::new();
    for (id, result) in results {
        negatives.insert(id, result?);
    }
    Ok(negatives)
}

/// Recovers the innovation text from a random-innovation completion,
/// tolerating the presence or absence of the template header.
fn parse_innovation_text(completion: &str) -> Option<String> {
    let trimmed = completion.trim();
    let body = trimmed
        .strip_prefix("Innovation:")
        .unwrap_or(trimmed)
        .trim();
    let body = body.strip_suffix("[END]").unwrap_or(body).trim();
    (!body.is_empty()).then(|| body.to_string())
}

/// Builds one of the three evaluator datasets.
///
/// Every eligible record contributes a positive example (its own innovation,
/// labeled related) and a negative example (the generated innovation from
/// `negatives`, labeled unrelated); problem-side fields always stay the
/// record's originals. Records lacking the field this evaluator compares
/// against are skipped. A record whose needed negative is missing fails the
/// build, as does any segment already containing a marker literal. Panics if
/// called with a generator kind.
pub fn build_evaluator_dataset(
    records: &[InnovationRecord],
    negatives: &BTreeMap<String, String>,
    kind: ModelKind,
) -> Result<DatasetBuild, DatagenError> {
    assert!(kind.is_evaluator(), "{kind} is not an evaluator kind");
    let mut examples = Vec::new();
    let mut skipped = Vec::new();
    for record in records {
        let eligible = match kind {
            ModelKind::EvalBio => true,
            ModelKind::EvalBen => !record.benefits.is_empty(),
            ModelKind::EvalCha => !record.challenge.is_empty(),
            _ => unreachable!(),
        };
        if !eligible {
            skipped.push(record.id.clone());
            continue;
        }
        let negative =
            negatives
                .get(&record.id)
                .ok_or_else(|| DatagenError::MissingNegative {
                    record_id: record.id.clone(),
                })?;

        let benefits_joined = templates::join_keywords(&record.benefits);
        let segments: &[&str] = match kind {
            ModelKind::EvalBio => &[&record.biomimicry, &record.innovation, negative],
            ModelKind::EvalBen => &[&record.innovation, negative, &benefits_joined],
            ModelKind::EvalCha => &[&record.challenge, &record.innovation, negative],
            _ => unreachable!(),
        };
        for segment in segments {
            if let Some(tag) = find_marker(segment) {
                return Err(DatagenError::MarkerCollision {
                    record_id: record.id.clone(),
                    tag,
                });
            }
        }

        let (positive_prompt, negative_prompt) = match kind {
            ModelKind::EvalBio => (
                templates::eval_bio_prompt(&record.biomimicry, &record.innovation),
                templates::eval_bio_prompt(&record.biomimicry, negative),
            ),
            ModelKind::EvalBen => (
                templates::eval_ben_prompt(&record.innovation, &record.benefits),
                templates::eval_ben_prompt(negative, &record.benefits),
            ),
            ModelKind::EvalCha => (
                templates::eval_cha_prompt(&record.challenge, &record.innovation),
                templates::eval_cha_prompt(&record.challenge, negative),
            ),
            _ => unreachable!(),
        };
        examples.push(FineTuneExample {
            prompt: positive_prompt,
            completion: templates::related_completion(),
            label: Some(Label::Related),
            source_record_id: record.id.clone(),
        });
        examples.push(FineTuneExample {
            prompt: negative_prompt,
            completion: templates::unrelated_completion(),
            label: Some(Label::Unrelated),
            source_record_id: record.id.clone(),
        });
    }
    if examples.is_empty() {
        return Err(DatagenError::EmptyDataset { kind });
    }
    Ok(DatasetBuild {
        kind,
        examples,
        skipped,
    })
}

/// Splits a dataset into train and validation parts.
///
/// The split is stratified by label so evaluator datasets keep their classes
/// balanced on both sides, shuffled per stratum with a seeded Fisher–Yates,
/// and sized by round-half-up of `train_fraction × stratum size`. The two
/// parts partition the input; identical inputs and seed reproduce the split
/// exactly.
pub fn split(
    kind: ModelKind,
    examples: Vec<FineTuneExample>,
    config: &SplitConfig,
) -> Result<LabeledDataset, DatagenError> {
    if config.train_num == 0 || config.train_den == 0 || config.train_num >= config.train_den {
        return Err(DatagenError::InvalidSplitFraction {
            num: config.train_num,
            den: config.train_den,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut train = Vec::new();
    let mut validation = Vec::new();
    // Fixed stratum order keeps the output deterministic.
    let strata = [None, Some(Label::Related), Some(Label::Unrelated)];
    let mut examples: Vec<Option<FineTuneExample>> = examples.into_iter().map(Some).collect();
    for stratum_label in strata {
        let mut indices: Vec<usize> = examples
            .iter()
            .enumerate()
            .filter(|(_, e)| e.as_ref().is_some_and(|e| e.label == stratum_label))
            .map(|(i, _)| i)
            .collect();
        fisher_yates(&mut indices, &mut rng);
        let k = config.train_count(indices.len());
        for (pos, &i) in indices.iter().enumerate() {
            let example = examples[i].take().expect("each index is drained once");
            if pos < k {
                train.push(example);
            } else {
                validation.push(example);
            }
        }
    }
    Ok(LabeledDataset {
        kind,
        train,
        validation,
    })
}

/// In-place Fisher–Yates driven by raw 64-bit draws, so the result depends
/// only on the ChaCha stream and not on any distribution implementation.
fn fisher_yates<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

/// Fine-tuning batch size as a function of train-set size:
/// `max(1, round(0.002 * n))`, computed exactly.
pub fn batch_size_rule(n_train: usize) -> usize {
    let rounded = (2 * n_train as u128 + 500) / 1000;
    (rounded as usize).max(1)
}

/// The JSONL line shape: exactly a prompt and a completion.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonlExample {
    prompt: String,
    completion: String,
}

/// Writes examples as JSON-lines (`{"prompt": …, "completion": …}` per
/// line, UTF-8, trailing newline) and returns the number written.
pub fn export_jsonl(examples: &[FineTuneExample], path: &Path) -> Result<usize, DatagenError> {
    let io_err = |source: std::io::Error| DatagenError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut writer = std::io::BufWriter::new(file);
    for example in examples {
        let line = serde_json::to_string(&JsonlExample {
            prompt: example.prompt.clone(),
            completion: example.completion.clone(),
        })
        .expect("prompt/completion strings always serialize");
        writer.write_all(line.as_bytes()).map_err(io_err)?;
        writer.write_all(b"\n").map_err(io_err)?;
    }
    writer.flush().map_err(io_err)?;
    Ok(examples.len())
}

/// Reads a JSONL dataset back as `(prompt, completion)` pairs.
pub fn import_jsonl(path: &Path) -> Result<Vec<(String, String)>, DatagenError> {
    let file = std::fs::File::open(path).map_err(|source| DatagenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut pairs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| DatagenError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.is_empty() {
            continue;
        }
        let example: JsonlExample =
            serde_json::from_str(&line).map_err(|e| DatagenError::Jsonl {
                line: i + 1,
                message: e.to_string(),
            })?;
        pairs.push((example.prompt, example.completion));
    }
    Ok(pairs)
}
