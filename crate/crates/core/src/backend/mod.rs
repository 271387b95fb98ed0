//! The language-model backend contract.
//!
//! Everything that talks to a model goes through the [`Backend`] trait:
//! free-text completion, binary relevancy classification, and fine-tune job
//! management. Two implementations ship with the crate:
//!
//! * [`RemoteBackend`] speaks HTTP+JSON to a hosted model API, with bounded
//!   retries and a bounded in-flight request limit.
//! * [`MockBackend`] answers from corpus material as a pure function of
//!   `(seed, request)`, so pipelines can run hermetically and reproduce
//!   byte-identical artifacts.

pub mod mock;
pub mod remote;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use mock::MockBackend;
pub use remote::{RemoteBackend, RemoteConfig, RetryPolicy};

/// Default completion length budget, in tokens.
pub const DEFAULT_MAX_TOKENS: usize = 400;
/// Default sampling temperature for concept generation.
pub const DEFAULT_GENERATION_TEMPERATURE: f64 = 0.8;
/// Classification always runs greedy.
pub const DEFAULT_CLASSIFICATION_TEMPERATURE: f64 = 0.0;
/// Default number of fine-tuning epochs.
pub const DEFAULT_EPOCHS: usize = 4;
/// The relevancy decision threshold. Fixed by the method definition, not
/// configurable: a probability of exactly 0.5 counts as related.
pub const CLASSIFICATION_THRESHOLD: f64 = 0.5;

/// Binary relevancy label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Related,
    Unrelated,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Related => "related",
            Label::Unrelated => "unrelated",
        }
    }
}

/// A text completion request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub model: String,
    pub prompt: String,
    pub max_tokens: usize,
    /// Must be >= 0.
    pub temperature: f64,
    /// Generation halts at the first occurrence of any of these sequences;
    /// the sequence itself is not returned.
    pub stop: Vec<String>,
    /// Number of independent samples to return.
    pub n: usize,
}

impl CompletionRequest {
    /// A request with the crate defaults: 400 max tokens, temperature 0.8,
    /// the `"\n[END]"` stop sequence, one sample.
    pub fn new(model: impl Into<String>, prompt: impl Into<String>) -> Self {
        CompletionRequest {
            model: model.into(),
            prompt: prompt.into(),
            max_tokens: DEFAULT_MAX_TOKENS,
            temperature: DEFAULT_GENERATION_TEMPERATURE,
            stop: vec![crate::datagen::templates::COMPLETION_END.to_string()],
            n: 1,
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_max_tokens(mut self, max_tokens: usize) -> Self {
        self.max_tokens = max_tokens;
        self
    }
}

/// The texts returned for one completion request.
#[derive(Debug, Clone, PartialEq)]
pub struct CompletionResponse {
    /// One entry per requested sample, already truncated at the stop
    /// sequence.
    pub texts: Vec<String>,
    /// Per-text `(token, logprob)` pairs, when the backend reports them.
    pub token_logprobs: Option<Vec<Vec<(String, f64)>>>,
}

/// Outcome of a binary relevancy classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub label: Label,
    /// Probability that the inputs are related, in `[0, 1]`.
    pub probability: f64,
}

impl ClassificationResult {
    /// Builds a result from a related-probability, deriving the label from
    /// the fixed 0.5 threshold (0.5 itself counts as related).
    ///
    /// Panics if `probability` is outside `[0, 1]` — backends are required
    /// to normalize before calling.
    pub fn from_probability(probability: f64) -> Self {
        assert!(
            (0.0..=1.0).contains(&probability),
            "probability {probability} outside [0, 1]"
        );
        let label = if probability >= CLASSIFICATION_THRESHOLD {
            Label::Related
        } else {
            Label::Unrelated
        };
        ClassificationResult { label, probability }
    }

    /// Renormalizes the logprobs of the two label tokens into a related
    /// probability: `p = exp(lp_rel) / (exp(lp_rel) + exp(lp_unrel))`.
    ///
    /// `-inf` is a legal input for a label the backend considered
    /// impossible. If both are `-inf` the result falls back to 0.5.
    pub fn from_label_logprobs(lp_related: f64, lp_unrelated: f64) -> Self {
        let m = lp_related.max(lp_unrelated);
        let probability = if m == f64::NEG_INFINITY {
            0.5
        } else {
            let a = (lp_related - m).exp();
            let b = (lp_unrelated - m).exp();
            a / (a + b)
        };
        Self::from_probability(probability)
    }
}

/// Base model class for a fine-tune job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseModel {
    /// Free-text concept generators.
    Generator,
    /// Binary relevancy classifiers.
    Classifier,
}

/// Fine-tune job lifecycle states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobStatus {
    Pending,
    Running,
    Succeeded,
    Failed,
}

impl JobStatus {
    pub fn is_terminal(self) -> bool {
        matches!(self, JobStatus::Succeeded | JobStatus::Failed)
    }
}

/// A fine-tune job, as submitted and as reported back by polling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FineTuneJob {
    pub base_model: BaseModel,
    pub dataset_path: PathBuf,
    pub epochs: usize,
    pub batch_size: usize,
    /// Empty until assigned by `submit_finetune`.
    pub job_id: String,
    pub status: JobStatus,
    /// For classifier jobs: validation accuracy after each completed epoch.
    /// Never longer than `epochs`.
    pub per_epoch_validation_accuracy: Vec<f64>,
    /// The resulting model id, present once the job has succeeded.
    pub fine_tuned_model: Option<String>,
}

impl FineTuneJob {
    pub fn new(
        base_model: BaseModel,
        dataset_path: impl Into<PathBuf>,
        epochs: usize,
        batch_size: usize,
    ) -> Self {
        FineTuneJob {
            base_model,
            dataset_path: dataset_path.into(),
            epochs,
            batch_size,
            job_id: String::new(),
            status: JobStatus::Pending,
            per_epoch_validation_accuracy: Vec::new(),
            fine_tuned_model: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BackendError {
    #[error("backend returned status {status}: {body}")]
    Http { status: u16, body: String },
    #[error("rate limited; gave up after {attempts} attempts")]
    RateLimited { attempts: u32 },
    #[error("request timed out after {seconds}s")]
    Timeout { seconds: u64 },
    #[error("unknown model: {model}")]
    UnknownModel { model: String },
    #[error("classification response carried no logprobs for the label tokens")]
    MissingLogprobs,
    #[error("invalid fine-tune dataset {path}: {reason}")]
    InvalidDataset { path: String, reason: String },
    #[error("unknown fine-tune job: {job_id}")]
    UnknownJob { job_id: String },
    #[error("classification prompt is malformed: {reason}")]
    MalformedPrompt { reason: String },
    #[error("malformed backend response: {reason}")]
    MalformedResponse { reason: String },
    #[error("transport error: {message}")]
    Transport { message: String },
}

/// The language-model backend contract.
///
/// Implementations must be safe to call from multiple threads; callers fan
/// out under the backend's own in-flight limits.
pub trait Backend: Send + Sync {
    /// Returns `request.n` sampled completions, each truncated at the first
    /// stop sequence.
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError>;

    /// Classifies an evaluator prompt with the named model. The label
    /// follows the fixed 0.5 threshold: ties count as related.
    fn classify(&self, model: &str, prompt: &str) -> Result<ClassificationResult, BackendError>;

    /// Submits a fine-tune job and returns its id.
    fn submit_finetune(&self, job: &FineTuneJob) -> Result<String, BackendError>;

    /// Fetches the current state of a submitted job. Once the status is
    /// `Succeeded` the job carries the resulting fine-tuned model id.
    fn poll_finetune(&self, job_id: &str) -> Result<FineTuneJob, BackendError>;
}

/// Cuts `text` at the first occurrence of any stop sequence, exclusive.
pub fn truncate_at_stop(text: &str, stop: &[String]) -> String {
    let cut = stop
        .iter()
        .filter(|s| !s.is_empty())
        .filter_map(|s| text.find(s.as_str()))
        .min()
        .unwrap_or(text.len());
    text[..cut].to_string()
}
