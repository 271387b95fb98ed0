//! A deterministic, corpus-backed mock backend.
//!
//! The mock answers every request as a pure function of `(seed, request)`,
//! with no clock, filesystem state, or process entropy involved, so two runs
//! with the same seed produce byte-identical artifacts on any platform.
//!
//! * Completions select a corpus record via a stable 64-bit FNV-1a hash of
//!   `(seed, prompt, sample index)` modulo corpus size and render the
//!   completion template matching the requested model's kind.
//! * Classification recovers the two marker-wrapped segments from the
//!   prompt, computes the Jaccard overlap `J` of their lowercase content
//!   words, and maps it through the logistic `1 / (1 + exp(-10 (J - 0.1)))`,
//!   so disjoint segments score ≈ 0.269 and near-identical ones above 0.9.
//! * Fine-tune jobs validate the dataset file, succeed after a configurable
//!   number of polls, and mint a model id that is itself callable, with the
//!   completion shape inferred from the training data.

use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::corpus::InnovationRecord;
use crate::datagen::markers::extract_segments;
use crate::datagen::templates;
use crate::datagen::ModelKind;
use crate::text;

use super::{
    truncate_at_stop, Backend, BackendError, BaseModel, ClassificationResult, CompletionRequest,
    CompletionResponse, FineTuneJob, JobStatus,
};

/// Steepness of the mock classifier's logistic.
const LOGISTIC_SLOPE: f64 = 10.0;
/// Jaccard overlap at which the mock classifier sits at p = 0.5.
const LOGISTIC_MIDPOINT: f64 = 0.1;

/// How a model id answers `complete`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CompletionShape {
    /// " Biomimicry: …\n\nInnovation: …" from the selected record.
    Generator,
    /// " Innovation: …" from the selected record.
    RandomInnovation,
    /// " related" / " unrelated" according to the logistic.
    Classifier,
}

impl CompletionShape {
    fn for_kind(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Gen1 | ModelKind::Gen2 | ModelKind::Gen3 => CompletionShape::Generator,
            ModelKind::RandomInno => CompletionShape::RandomInnovation,
            ModelKind::EvalBio | ModelKind::EvalBen | ModelKind::EvalCha => {
                CompletionShape::Classifier
            }
        }
    }
}

struct MockJob {
    job: FineTuneJob,
    polls: u32,
    shape: CompletionShape,
}

/// The deterministic mock backend. See the module docs for its behavior.
pub struct MockBackend {
    seed: u64,
    records: Vec<InnovationRecord>,
    models: Mutex<BTreeMap<String, CompletionShape>>,
    jobs: Mutex<BTreeMap<String, MockJob>>,
    polls_to_success: u32,
}

impl MockBackend {
    /// Standard model ids registered by [`MockBackend::with_standard_models`].
    pub const STANDARD_MODELS: [(&'static str, ModelKind); 7] = [
        ("mock/gen1", ModelKind::Gen1),
        ("mock/gen2", ModelKind::Gen2),
        ("mock/gen3", ModelKind::Gen3),
        ("mock/random-inno", ModelKind::RandomInno),
        ("mock/eval-bio", ModelKind::EvalBio),
        ("mock/eval-ben", ModelKind::EvalBen),
        ("mock/eval-cha", ModelKind::EvalCha),
    ];

    /// Creates a mock over the given corpus records with no models
    /// registered. Panics if `records` is empty: completions index into it.
    pub fn new(records: Vec<InnovationRecord>, seed: u64) -> Self {
        assert!(!records.is_empty(), "mock backend needs a non-empty corpus");
        MockBackend {
            seed,
            records,
            models: Mutex::new(BTreeMap::new()),
            jobs: Mutex::new(BTreeMap::new()),
            polls_to_success: 2,
        }
    }

    /// Creates a mock with the seven standard model ids registered.
    pub fn with_standard_models(records: Vec<InnovationRecord>, seed: u64) -> Self {
        let backend = Self::new(records, seed);
        for (id, kind) in Self::STANDARD_MODELS {
            backend.register_model(id, kind);
        }
        backend
    }

    /// Registers (or re-registers) a model id with the given kind.
    pub fn register_model(&self, id: &str, kind: ModelKind) {
        self.models
            .lock()
            .unwrap()
            .insert(id.to_string(), CompletionShape::for_kind(kind));
    }

    /// Sets how many `poll_finetune` calls a job needs before it succeeds.
    pub fn with_polls_to_success(mut self, polls: u32) -> Self {
        self.polls_to_success = polls;
        self
    }

    fn shape_of(&self, model: &str) -> Result<CompletionShape, BackendError> {
        self.models
            .lock()
            .unwrap()
            .get(model)
            .copied()
            .ok_or_else(|| BackendError::UnknownModel {
                model: model.to_string(),
            })
    }

    fn select_record(&self, prompt: &str, sample_index: u64) -> &InnovationRecord {
        let h = fnv1a64(&[
            &self.seed.to_le_bytes(),
            prompt.as_bytes(),
            &sample_index.to_le_bytes(),
        ]);
        &self.records[(h % self.records.len() as u64) as usize]
    }

    /// The logistic relevancy probability for a two-segment prompt.
    fn segment_probability(&self, prompt: &str) -> Result<f64, BackendError> {
        let segments = extract_segments(prompt);
        if segments.len() < 2 {
            return Err(BackendError::MalformedPrompt {
                reason: format!(
                    "expected two marker-wrapped segments, found {}",
                    segments.len()
                ),
            });
        }
        let stop = text::default_stopwords();
        let a = text::content_word_set(segments[0].1, stop);
        let b = text::content_word_set(segments[1].1, stop);
        let j = jaccard(&a, &b);
        Ok(logistic(j))
    }
}

impl Backend for MockBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        let shape = self.shape_of(&request.model)?;
        let mut texts = Vec::with_capacity(request.n);
        for i in 0..request.n {
            let full = match shape {
                CompletionShape::Generator => {
                    let r = self.select_record(&request.prompt, i as u64);
                    templates::render_completion(r)
                }
                CompletionShape::RandomInnovation => {
                    let r = self.select_record(&request.prompt, i as u64);
                    templates::random_innovation_completion(&r.innovation)
                }
                CompletionShape::Classifier => {
                    if self.segment_probability(&request.prompt)? >= super::CLASSIFICATION_THRESHOLD
                    {
                        templates::related_completion()
                    } else {
                        templates::unrelated_completion()
                    }
                }
            };
            texts.push(truncate_at_stop(&full, &request.stop));
        }
        Ok(CompletionResponse {
            texts,
            token_logprobs: None,
        })
    }

    fn classify(&self, model: &str, prompt: &str) -> Result<ClassificationResult, BackendError> {
        match self.shape_of(model)? {
            CompletionShape::Classifier => {}
            _ => {
                return Err(BackendError::UnknownModel {
                    model: format!("{model} (not a classifier)"),
                })
            }
        }
        let p = self.segment_probability(prompt)?;
        Ok(ClassificationResult::from_probability(p))
    }

    fn submit_finetune(&self, job: &FineTuneJob) -> Result<String, BackendError> {
        let invalid = |reason: String| BackendError::InvalidDataset {
            path: job.dataset_path.display().to_string(),
            reason,
        };
        let examples =
            crate::datagen::import_jsonl(&job.dataset_path).map_err(|e| invalid(e.to_string()))?;
        if examples.is_empty() {
            return Err(invalid("dataset contains no examples".to_string()));
        }
        let shape = infer_shape(&examples[0].1, job.base_model);

        let dataset_bytes = std::fs::read(&job.dataset_path).map_err(|e| invalid(e.to_string()))?;
        let base_tag = match job.base_model {
            BaseModel::Generator => 0u8,
            BaseModel::Classifier => 1u8,
        };
        let h = fnv1a64(&[
            &self.seed.to_le_bytes(),
            &dataset_bytes,
            &[base_tag],
            &(job.epochs as u64).to_le_bytes(),
            &(job.batch_size as u64).to_le_bytes(),
        ]);
        let job_id = format!("ftjob-{h:016x}");

        let mut submitted = job.clone();
        submitted.job_id = job_id.clone();
        submitted.status = JobStatus::Pending;
        submitted.per_epoch_validation_accuracy = Vec::new();
        submitted.fine_tuned_model = None;
        self.jobs.lock().unwrap().insert(
            job_id.clone(),
            MockJob {
                job: submitted,
                polls: 0,
                shape,
            },
        );
        Ok(job_id)
    }

    fn poll_finetune(&self, job_id: &str) -> Result<FineTuneJob, BackendError> {
        let mut jobs = self.jobs.lock().unwrap();
        let entry = jobs.get_mut(job_id).ok_or_else(|| BackendError::UnknownJob {
            job_id: job_id.to_string(),
        })?;
        entry.polls += 1;
        if entry.polls >= self.polls_to_success && !entry.job.status.is_terminal() {
            entry.job.status = JobStatus::Succeeded;
            let model_id = format!("{job_id}:ft");
            entry.job.fine_tuned_model = Some(model_id.clone());
            if entry.job.base_model == BaseModel::Classifier {
                entry.job.per_epoch_validation_accuracy =
                    accuracy_curve(self.seed, job_id, entry.job.epochs);
            }
            self.models.lock().unwrap().insert(model_id, entry.shape);
        } else if !entry.job.status.is_terminal() {
            entry.job.status = JobStatus::Running;
        }
        Ok(entry.job.clone())
    }
}

/// Infers the completion shape a fine-tuned model should mimic from the
/// first training completion; the base model class breaks ties for
/// unrecognized templates.
fn infer_shape(first_completion: &str, base: BaseModel) -> CompletionShape {
    if first_completion.starts_with(" Biomimicry:") {
        CompletionShape::Generator
    } else if first_completion.starts_with(" Innovation:") {
        CompletionShape::RandomInnovation
    } else if first_completion.starts_with(" related") || first_completion.starts_with(" unrelated")
    {
        CompletionShape::Classifier
    } else {
        match base {
            BaseModel::Generator => CompletionShape::Generator,
            BaseModel::Classifier => CompletionShape::Classifier,
        }
    }
}

/// A monotone non-decreasing per-epoch accuracy curve in `[0.5, 0.99]`,
/// deterministic in `(seed, job_id)`.
fn accuracy_curve(seed: u64, job_id: &str, epochs: usize) -> Vec<f64> {
    let mut curve = Vec::with_capacity(epochs);
    let h = fnv1a64(&[&seed.to_le_bytes(), job_id.as_bytes()]);
    let mut acc = 0.70 + (h % 1000) as f64 / 10_000.0;
    for epoch in 0..epochs {
        let step = fnv1a64(&[&h.to_le_bytes(), &(epoch as u64).to_le_bytes()]);
        acc = (acc + (step % 500) as f64 / 10_000.0).min(0.99);
        curve.push(acc);
    }
    curve
}

fn logistic(j: f64) -> f64 {
    1.0 / (1.0 + (-LOGISTIC_SLOPE * (j - LOGISTIC_MIDPOINT)).exp())
}

/// Jaccard similarity of two sets; two empty sets count as sharing nothing.
fn jaccard(a: &std::collections::BTreeSet<String>, b: &std::collections::BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        return 0.0;
    }
    a.intersection(b).count() as f64 / union as f64
}

/// FNV-1a over the concatenation of `parts`. Stable across platforms and
/// processes, unlike the std hasher.
fn fnv1a64(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &byte in *part {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}
