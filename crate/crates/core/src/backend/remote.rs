//! HTTP+JSON backend for hosted language-model APIs.
//!
//! The wire format follows the common hosted-completions shape: a
//! completions endpoint taking `{model, prompt, max_tokens, temperature,
//! stop, n, logprobs?}` and returning `{choices: [{text, logprobs?}]}`, and
//! a fine-tunes endpoint for job submission and polling. Endpoint paths are
//! configuration, not code.
//!
//! Transport policy, fixed by contract:
//! * 429 and 5xx responses are retried with exponential backoff (1s base,
//!   factor 2) up to 5 attempts, then surfaced.
//! * At most `in_flight` requests (default 4) run concurrently.
//! * Retries reuse the same idempotency key, derived from the request body.

use std::collections::BTreeMap;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::Deserialize;
use serde_json::json;

use super::{
    truncate_at_stop, Backend, BackendError, BaseModel, ClassificationResult, CompletionRequest,
    CompletionResponse, FineTuneJob, JobStatus,
};

/// Exponential backoff settings for retryable failures.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub base_delay: Duration,
    pub factor: f64,
    pub max_attempts: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            base_delay: Duration::from_secs(1),
            factor: 2.0,
            max_attempts: 5,
        }
    }
}

/// Connection settings for a hosted API.
#[derive(Debug, Clone)]
pub struct RemoteConfig {
    /// Scheme and host, e.g. `https://api.example.com`.
    pub base_url: String,
    /// Bearer token. Comes from the environment, never from config files.
    pub api_key: String,
    pub completions_path: String,
    pub fine_tunes_path: String,
    pub timeout: Duration,
    /// Maximum concurrent requests.
    pub in_flight: usize,
    pub retry: RetryPolicy,
}

impl RemoteConfig {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>) -> Self {
        RemoteConfig {
            base_url: base_url.into(),
            api_key: api_key.into(),
            completions_path: "/v1/completions".to_string(),
            fine_tunes_path: "/v1/fine-tunes".to_string(),
            timeout: Duration::from_secs(30),
            in_flight: 4,
            retry: RetryPolicy::default(),
        }
    }
}

/// Metadata kept per submitted job so polls can reconstruct a full
/// [`FineTuneJob`] even when the server reports only status fields.
#[derive(Debug, Clone)]
struct SubmittedJob {
    base_model: BaseModel,
    dataset_path: std::path::PathBuf,
    epochs: usize,
    batch_size: usize,
}

/// A counting semaphore bounding concurrent requests.
struct Gate {
    available: Mutex<usize>,
    freed: Condvar,
}

impl Gate {
    fn new(limit: usize) -> Self {
        Gate {
            available: Mutex::new(limit.max(1)),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> GateGuard<'_> {
        let mut available = self.available.lock().unwrap();
        while *available == 0 {
            available = self.freed.wait(available).unwrap();
        }
        *available -= 1;
        GateGuard { gate: self }
    }
}

struct GateGuard<'a> {
    gate: &'a Gate,
}

impl Drop for GateGuard<'_> {
    fn drop(&mut self) {
        *self.gate.available.lock().unwrap() += 1;
        self.gate.freed.notify_one();
    }
}

/// Backend implementation over a hosted HTTP API.
pub struct RemoteBackend {
    config: RemoteConfig,
    client: reqwest::blocking::Client,
    gate: Gate,
    jobs: Mutex<BTreeMap<String, SubmittedJob>>,
}

impl RemoteBackend {
    pub fn new(config: RemoteConfig) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| BackendError::Transport {
                message: e.to_string(),
            })?;
        Ok(RemoteBackend {
            gate: Gate::new(config.in_flight),
            client,
            jobs: Mutex::new(BTreeMap::new()),
            config,
        })
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.config.base_url.trim_end_matches('/'), path)
    }

    /// POSTs `body`, retrying 429 and 5xx per policy. The idempotency key is
    /// derived from the body so every retry carries the same key.
    fn post_json(&self, url: &str, body: &serde_json::Value) -> Result<String, BackendError> {
        let payload = body.to_string();
        let idempotency_key = format!("{:016x}", fnv1a64(payload.as_bytes()));
        self.send_with_retry(|| {
            self.client
                .post(url)
                .bearer_auth(&self.config.api_key)
                .header("Idempotency-Key", idempotency_key.clone())
                .header("Content-Type", "application/json")
                .body(payload.clone())
        })
    }

    fn get(&self, url: &str) -> Result<String, BackendError> {
        self.send_with_retry(|| self.client.get(url).bearer_auth(&self.config.api_key))
    }

    fn send_with_retry(
        &self,
        build: impl Fn() -> reqwest::blocking::RequestBuilder,
    ) -> Result<String, BackendError> {
        let _slot = self.gate.acquire();
        let policy = &self.config.retry;
        let mut delay = policy.base_delay;
        let mut attempt = 0;
        loop {
            attempt += 1;
            match build().send() {
                Ok(response) => {
                    let status = response.status().as_u16();
                    let retryable = status == 429 || (500..600).contains(&status);
                    if retryable && attempt < policy.max_attempts {
                        std::thread::sleep(delay);
                        delay = delay.mul_f64(policy.factor);
                        continue;
                    }
                    let body = response.text().unwrap_or_default();
                    if status == 429 {
                        return Err(BackendError::RateLimited { attempts: attempt });
                    }
                    if !(200..300).contains(&status) {
                        return Err(BackendError::Http {
                            status,
                            body: excerpt(&body),
                        });
                    }
                    return Ok(body);
                }
                Err(e) if e.is_timeout() => {
                    return Err(BackendError::Timeout {
                        seconds: self.config.timeout.as_secs(),
                    });
                }
                Err(e) => {
                    return Err(BackendError::Transport {
                        message: e.to_string(),
                    });
                }
            }
        }
    }
}

#[derive(Debug, Deserialize)]
struct WireCompletionResponse {
    choices: Vec<WireChoice>,
}

#[derive(Debug, Deserialize)]
struct WireChoice {
    text: String,
    #[serde(default)]
    logprobs: Option<WireLogprobs>,
}

#[derive(Debug, Deserialize, Default)]
struct WireLogprobs {
    #[serde(default)]
    tokens: Vec<String>,
    #[serde(default)]
    token_logprobs: Vec<f64>,
    #[serde(default)]
    top_logprobs: Vec<BTreeMap<String, f64>>,
}

#[derive(Debug, Deserialize)]
struct WireFineTuneResponse {
    job_id: String,
    #[serde(default)]
    status: Option<JobStatus>,
    #[serde(default)]
    fine_tuned_model: Option<String>,
    #[serde(default)]
    per_epoch_validation_accuracy: Vec<f64>,
    #[serde(default)]
    base_model: Option<BaseModel>,
    #[serde(default)]
    dataset_path: Option<String>,
    #[serde(default)]
    epochs: Option<usize>,
    #[serde(default)]
    batch_size: Option<usize>,
}

impl Backend for RemoteBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        let body = json!({
            "model": request.model,
            "prompt": request.prompt,
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
            "stop": request.stop,
            "n": request.n,
        });
        let raw = self.post_json(&self.url(&self.config.completions_path), &body)?;
        let parsed: WireCompletionResponse = parse_json(&raw)?;
        if parsed.choices.len() != request.n {
            return Err(BackendError::MalformedResponse {
                reason: format!(
                    "requested {} samples, response has {} choices",
                    request.n,
                    parsed.choices.len()
                ),
            });
        }
        let mut texts = Vec::with_capacity(parsed.choices.len());
        let mut logprobs = Vec::new();
        let mut any_logprobs = false;
        for choice in &parsed.choices {
            // Servers usually honor `stop` themselves; truncating here makes
            // the contract hold regardless.
            texts.push(truncate_at_stop(&choice.text, &request.stop));
            match &choice.logprobs {
                Some(lp) if !lp.tokens.is_empty() => {
                    any_logprobs = true;
                    logprobs.push(
                        lp.tokens
                            .iter()
                            .cloned()
                            .zip(lp.token_logprobs.iter().copied())
                            .collect(),
                    );
                }
                _ => logprobs.push(Vec::new()),
            }
        }
        Ok(CompletionResponse {
            texts,
            token_logprobs: any_logprobs.then_some(logprobs),
        })
    }

    fn classify(&self, model: &str, prompt: &str) -> Result<ClassificationResult, BackendError> {
        let body = json!({
            "model": model,
            "prompt": prompt,
            "max_tokens": 1,
            "temperature": super::DEFAULT_CLASSIFICATION_TEMPERATURE,
            "logprobs": 5,
            "n": 1,
        });
        let raw = self.post_json(&self.url(&self.config.completions_path), &body)?;
        let parsed: WireCompletionResponse = parse_json(&raw)?;
        let top = parsed
            .choices
            .first()
            .and_then(|c| c.logprobs.as_ref())
            .and_then(|lp| lp.top_logprobs.first())
            .ok_or(BackendError::MissingLogprobs)?;

        let label_logprob = |label: &str| -> Option<f64> {
            top.iter()
                .filter(|(token, _)| token.trim().eq_ignore_ascii_case(label))
                .map(|(_, lp)| *lp)
                .fold(None, |acc, lp| Some(acc.map_or(lp, |a: f64| a.max(lp))))
        };
        let related = label_logprob("related");
        let unrelated = label_logprob("unrelated");
        if related.is_none() && unrelated.is_none() {
            return Err(BackendError::MissingLogprobs);
        }
        // A label absent from the top-k is treated as vanishingly unlikely.
        Ok(ClassificationResult::from_label_logprobs(
            related.unwrap_or(f64::NEG_INFINITY),
            unrelated.unwrap_or(f64::NEG_INFINITY),
        ))
    }

    fn submit_finetune(&self, job: &FineTuneJob) -> Result<String, BackendError> {
        let body = json!({
            "base_model": job.base_model,
            "dataset_path": job.dataset_path.display().to_string(),
            "epochs": job.epochs,
            "batch_size": job.batch_size,
        });
        let raw = self.post_json(&self.url(&self.config.fine_tunes_path), &body)?;
        let parsed: WireFineTuneResponse = parse_json(&raw)?;
        self.jobs.lock().unwrap().insert(
            parsed.job_id.clone(),
            SubmittedJob {
                base_model: job.base_model,
                dataset_path: job.dataset_path.clone(),
                epochs: job.epochs,
                batch_size: job.batch_size,
            },
        );
        Ok(parsed.job_id)
    }

    fn poll_finetune(&self, job_id: &str) -> Result<FineTuneJob, BackendError> {
        let url = format!("{}/{}", self.url(&self.config.fine_tunes_path), job_id);
        let raw = self.get(&url)?;
        let parsed: WireFineTuneResponse = parse_json(&raw)?;
        let known = self.jobs.lock().unwrap().get(job_id).cloned();
        let job = FineTuneJob {
            base_model: parsed
                .base_model
                .or(known.as_ref().map(|k| k.base_model))
                .unwrap_or(BaseModel::Generator),
            dataset_path: parsed
                .dataset_path
                .map(Into::into)
                .or(known.as_ref().map(|k| k.dataset_path.clone()))
                .unwrap_or_default(),
            epochs: parsed
                .epochs
                .or(known.as_ref().map(|k| k.epochs))
                .unwrap_or(super::DEFAULT_EPOCHS),
            batch_size: parsed
                .batch_size
                .or(known.as_ref().map(|k| k.batch_size))
                .unwrap_or(1),
            job_id: parsed.job_id,
            status: parsed.status.unwrap_or(JobStatus::Pending),
            per_epoch_validation_accuracy: parsed.per_epoch_validation_accuracy,
            fine_tuned_model: parsed.fine_tuned_model,
        };
        Ok(job)
    }
}

fn parse_json<'a, T: Deserialize<'a>>(raw: &'a str) -> Result<T, BackendError> {
    serde_json::from_str(raw).map_err(|e| BackendError::MalformedResponse {
        reason: format!("{e}; body: {}", excerpt(raw)),
    })
}

fn excerpt(body: &str) -> String {
    const MAX: usize = 200;
    let trimmed = body.trim();
    if trimmed.chars().count() <= MAX {
        trimmed.to_string()
    } else {
        let cut: String = trimmed.chars().take(MAX).collect();
        format!("{cut}…")
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &byte in bytes {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
