//! Pipeline configuration: a flat `key = value` text format with dotted
//! section prefixes.
//!
//! Grammar (one setting per line):
//!
//! ```text
//! # comment                      blank lines and '#' lines are ignored
//! corpus.path = data/corpus.json
//! backend.kind = mock            # mock | remote
//! seed = 42
//! ```
//!
//! Unknown keys are rejected, as are duplicates. Relative paths are resolved
//! against the config file's directory at load time. Secrets never live in
//! the file: the API key is read exclusively from the `BIDFORGE_API_KEY`
//! environment variable. The relevancy threshold is fixed at 0.5 by design
//! and has no key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use bidforge::backend::{Backend, MockBackend, RemoteBackend, RemoteConfig, RetryPolicy};
use bidforge::diversity::EmbeddingFormat;
use bidforge::relevancy::EvaluatorModels;
use bidforge::{ConceptType, Corpus};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Environment variable holding the remote API key.
pub const API_KEY_ENV: &str = "BIDFORGE_API_KEY";

/// Which backend implementation a run talks to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Mock,
    Remote,
}

/// Model ids for the four generators and three evaluators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelIds {
    pub gen1: Option<String>,
    pub gen2: Option<String>,
    pub gen3: Option<String>,
    pub random_inno: Option<String>,
    pub eval_bio: Option<String>,
    pub eval_ben: Option<String>,
    pub eval_cha: Option<String>,
}

impl ModelIds {
    fn unset() -> Self {
        ModelIds {
            gen1: None,
            gen2: None,
            gen3: None,
            random_inno: None,
            eval_bio: None,
            eval_ben: None,
            eval_cha: None,
        }
    }

    /// The ids the mock backend registers out of the box.
    fn mock_defaults() -> Self {
        ModelIds {
            gen1: Some("mock/gen1".into()),
            gen2: Some("mock/gen2".into()),
            gen3: Some("mock/gen3".into()),
            random_inno: Some("mock/random-inno".into()),
            eval_bio: Some("mock/eval-bio".into()),
            eval_ben: Some("mock/eval-ben".into()),
            eval_cha: Some("mock/eval-cha".into()),
        }
    }
}

/// Remote connection settings (all have defaults except the base URL).
#[derive(Debug, Clone, PartialEq)]
pub struct BackendSettings {
    pub kind: BackendKind,
    pub base_url: Option<String>,
    pub completions_path: String,
    pub fine_tunes_path: String,
    pub timeout_ms: u64,
    pub in_flight: usize,
    pub max_attempts: u32,
    pub base_delay_ms: u64,
    pub backoff_factor: f64,
    /// Delay between fine-tune status polls (the mock needs none).
    pub poll_interval_ms: u64,
}

impl Default for BackendSettings {
    fn default() -> Self {
        BackendSettings {
            kind: BackendKind::Mock,
            base_url: None,
            completions_path: "/v1/completions".into(),
            fine_tunes_path: "/v1/fine-tunes".into(),
            timeout_ms: 30_000,
            in_flight: 4,
            max_attempts: 5,
            base_delay_ms: 500,
            backoff_factor: 2.0,
            poll_interval_ms: 1_000,
        }
    }
}

/// Generation defaults applied when a command has no explicit flags.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSettings {
    /// Concepts per problem spec.
    pub n: usize,
    pub temperature: f64,
    pub max_tokens: usize,
    /// Sampling budget; `None` means twice the requested count.
    pub budget: Option<usize>,
}

impl Default for GenerationSettings {
    fn default() -> Self {
        GenerationSettings {
            n: 50,
            temperature: bidforge::backend::DEFAULT_GENERATION_TEMPERATURE,
            max_tokens: bidforge::backend::DEFAULT_MAX_TOKENS,
            budget: None,
        }
    }
}

/// The full, resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus_path: Option<PathBuf>,
    pub backend: BackendSettings,
    pub models: ModelIds,
    pub generation: GenerationSettings,
    pub embeddings_path: Option<PathBuf>,
    pub embeddings_format: EmbeddingFormat,
    pub stopwords_path: Option<PathBuf>,
    pub lexicon_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus_path: None,
            backend: BackendSettings::default(),
            models: ModelIds::mock_defaults(),
            generation: GenerationSettings::default(),
            embeddings_path: None,
            embeddings_format: EmbeddingFormat::Word2VecText,
            stopwords_path: None,
            lexicon_path: None,
            output_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    /// Parses and resolves a config file. Relative paths inside the file are
    /// resolved against the file's own directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base)
    }

    /// Parses config text, resolving relative paths against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "line {line_no}: expected \"key = value\", found {line:?}"
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(CliError::Config(format!(
                    "line {line_no}: empty key or value"
                )));
            }
            if raw.insert(key.clone(), value).is_some() {
                return Err(CliError::Config(format!(
                    "line {line_no}: duplicate key {key}"
                )));
            }
        }
        Self::from_pairs(raw, base)
    }

    fn from_pairs(mut raw: BTreeMap<String, String>, base: &Path) -> Result<Self, CliError> {
        // Keys that exist in spirit but are refused on purpose get targeted
        // messages; everything else unknown gets the generic rejection.
        for refused in ["backend.api_key", "api_key"] {
            if raw.contains_key(refused) {
                return Err(CliError::Config(format!(
                    "{refused}: the API key is read only from the {API_KEY_ENV} \
                     environment variable, never from config files"
                )));
            }
        }
        for refused in ["evaluator.threshold", "threshold"] {
            if raw.contains_key(refused) {
                return Err(CliError::Config(format!(
                    "{refused}: the relevancy threshold is fixed at 0.5 and not configurable"
                )));
            }
        }

        let mut take = |key: &str| raw.remove(key);
        let resolve = |value: String| -> PathBuf {
            let p = PathBuf::from(value);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };

        let mut config = PipelineConfig::default();
        if let Some(v) = take("corpus.path") {
            config.corpus_path = Some(resolve(v));
        }
        if let Some(v) = take("backend.kind") {
            config.backend.kind = match v.as_str() {
                "mock" => BackendKind::Mock,
                "remote" => BackendKind::Remote,
                other => {
                    return Err(CliError::Config(format!(
                        "backend.kind: expected mock or remote, found {other:?}"
                    )))
                }
            };
        }
        if let Some(v) = take("backend.base_url") {
            config.backend.base_url = Some(v);
        }
        if let Some(v) = take("backend.completions_path") {
            config.backend.completions_path = v;
        }
        if let Some(v) = take("backend.fine_tunes_path") {
            config.backend.fine_tunes_path = v;
        }
        config.backend.timeout_ms =
            parse_or("backend.timeout_ms", take("backend.timeout_ms"), 30_000)?;
        config.backend.in_flight = parse_or("backend.in_flight", take("backend.in_flight"), 4)?;
        config.backend.max_attempts =
            parse_or("backend.max_attempts", take("backend.max_attempts"), 5)?;
        config.backend.base_delay_ms =
            parse_or("backend.base_delay_ms", take("backend.base_delay_ms"), 500)?;
        config.backend.backoff_factor = parse_or(
            "backend.backoff_factor",
            take("backend.backoff_factor"),
            2.0,
        )?;
        config.backend.poll_interval_ms = parse_or(
            "backend.poll_interval_ms",
            take("backend.poll_interval_ms"),
            1_000,
        )?;

        let model_defaults = match config.backend.kind {
            BackendKind::Mock => ModelIds::mock_defaults(),
            BackendKind::Remote => ModelIds::unset(),
        };
        config.models = ModelIds {
            gen1: take("models.gen1").or(model_defaults.gen1),
            gen2: take("models.gen2").or(model_defaults.gen2),
            gen3: take("models.gen3").or(model_defaults.gen3),
            random_inno: take("models.random_inno").or(model_defaults.random_inno),
            eval_bio: take("models.eval_bio").or(model_defaults.eval_bio),
            eval_ben: take("models.eval_ben").or(model_defaults.eval_ben),
            eval_cha: take("models.eval_cha").or(model_defaults.eval_cha),
        };

        config.generation.n = parse_or("generation.n", take("generation.n"), 50)?;
        if config.generation.n == 0 {
            return Err(CliError::Config("generation.n must be at least 1".into()));
        }
        config.generation.temperature = parse_or(
            "generation.temperature",
            take("generation.temperature"),
            bidforge::backend::DEFAULT_GENERATION_TEMPERATURE,
        )?;
        config.generation.max_tokens = parse_or(
            "generation.max_tokens",
            take("generation.max_tokens"),
            bidforge::backend::DEFAULT_MAX_TOKENS,
        )?;
        if let Some(v) = take("generation.budget") {
            config.generation.budget = Some(parse_value("generation.budget", &v)?);
        }

        if let Some(v) = take("embeddings.path") {
            config.embeddings_path = Some(resolve(v));
        }
        if let Some(v) = take("embeddings.format") {
            config.embeddings_format = match v.as_str() {
                "text" => EmbeddingFormat::Word2VecText,
                "binary" => EmbeddingFormat::Word2VecBinary,
                other => {
                    return Err(CliError::Config(format!(
                        "embeddings.format: expected text or binary, found {other:?}"
                    )))
                }
            };
        }
        if let Some(v) = take("stopwords.path") {
            config.stopwords_path = Some(resolve(v));
        }
        if let Some(v) = take("lexicon.path") {
            config.lexicon_path = Some(resolve(v));
        }
        if let Some(v) = take("output.dir") {
            config.output_dir = resolve(v);
        }
        config.seed = parse_or("seed", take("seed"), 0)?;

        if let Some((key, _)) = raw.into_iter().next() {
            return Err(CliError::Config(format!("unknown config key {key}")));
        }
        Ok(config)
    }

    /// The fixed relevancy decision threshold. Read-only by design: changing
    /// it would make pass-rate tables incomparable across runs.
    pub fn threshold(&self) -> f64 {
        bidforge::backend::CLASSIFICATION_THRESHOLD
    }

    /// SHA-256 over the canonical rendering of every effective setting, so
    /// identical configurations hash identically regardless of file
    /// formatting, and any override changes the hash.
    pub fn hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical().as_bytes());
        hex::encode(hasher.finalize())
    }

    /// Canonical `key = value` rendering of the effective configuration.
    pub fn canonical(&self) -> String {
        let path_str = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default()
        };
        let opt_str = |s: &Option<String>| s.clone().unwrap_or_default();
        let lines = [
            format!("backend.backoff_factor = {}", self.backend.backoff_factor),
            format!("backend.base_delay_ms = {}", self.backend.base_delay_ms),
            format!("backend.base_url = {}", opt_str(&self.backend.base_url)),
            format!(
                "backend.completions_path = {}",
                self.backend.completions_path
            ),
            format!("backend.fine_tunes_path = {}", self.backend.fine_tunes_path),
            format!("backend.in_flight = {}", self.backend.in_flight),
            format!(
                "backend.kind = {}",
                match self.backend.kind {
                    BackendKind::Mock => "mock",
                    BackendKind::Remote => "remote",
                }
            ),
            format!("backend.max_attempts = {}", self.backend.max_attempts),
            format!(
                "backend.poll_interval_ms = {}",
                self.backend.poll_interval_ms
            ),
            format!("backend.timeout_ms = {}", self.backend.timeout_ms),
            format!("corpus.path = {}", path_str(&self.corpus_path)),
            format!(
                "embeddings.format = {}",
                match self.embeddings_format {
                    EmbeddingFormat::Word2VecText => "text",
                    EmbeddingFormat::Word2VecBinary => "binary",
                }
            ),
            format!("embeddings.path = {}", path_str(&self.embeddings_path)),
            format!(
                "generation.budget = {}",
                self.generation
                    .budget
                    .map(|b| b.to_string())
                    .unwrap_or_default()
            ),
            format!("generation.max_tokens = {}", self.generation.max_tokens),
            format!("generation.n = {}", self.generation.n),
            format!("generation.temperature = {}", self.generation.temperature),
            format!("lexicon.path = {}", path_str(&self.lexicon_path)),
            format!("models.eval_ben = {}", opt_str(&self.models.eval_ben)),
            format!("models.eval_bio = {}", opt_str(&self.models.eval_bio)),
            format!("models.eval_cha = {}", opt_str(&self.models.eval_cha)),
            format!("models.gen1 = {}", opt_str(&self.models.gen1)),
            format!("models.gen2 = {}", opt_str(&self.models.gen2)),
            format!("models.gen3 = {}", opt_str(&self.models.gen3)),
            format!("models.random_inno = {}", opt_str(&self.models.random_inno)),
            format!("output.dir = {}", self.output_dir.display()),
            format!("seed = {}", self.seed),
            format!("stopwords.path = {}", path_str(&self.stopwords_path)),
        ];
        lines.join("\n") + "\n"
    }

    /// The corpus path, or a config error naming the key.
    pub fn require_corpus(&self) -> Result<&Path, CliError> {
        self.corpus_path
            .as_deref()
            .ok_or_else(|| CliError::Config("config key corpus.path is required".into()))
    }

    /// The embeddings path, or a config error naming the key.
    pub fn require_embeddings(&self) -> Result<&Path, CliError> {
        self.embeddings_path
            .as_deref()
            .ok_or_else(|| CliError::Config("config key embeddings.path is required".into()))
    }

    /// Loads the configured corpus.
    pub fn load_corpus(&self) -> Result<Corpus, CliError> {
        let path = self.require_corpus()?;
        let format = bidforge::CorpusFormat::from_extension(path).ok_or_else(|| {
            CliError::Config(format!(
                "corpus.path {}: cannot infer format from extension (expected .json or .csv)",
                path.display()
            ))
        })?;
        Ok(bidforge::corpus::load_corpus(path, format)?)
    }

    /// Builds the configured backend. The mock needs the corpus it echoes;
    /// the remote needs a base URL and the `BIDFORGE_API_KEY` variable.
    pub fn build_backend(&self) -> Result<Box<dyn Backend>, CliError> {
        match self.backend.kind {
            BackendKind::Mock => {
                let corpus = self.load_corpus()?;
                Ok(Box::new(MockBackend::with_standard_models(
                    corpus.records,
                    self.seed,
                )))
            }
            BackendKind::Remote => {
                let base_url = self.backend.base_url.clone().ok_or_else(|| {
                    CliError::Config(
                        "config key backend.base_url is required for the remote backend".into(),
                    )
                })?;
                let api_key = std::env::var(API_KEY_ENV).map_err(|_| {
                    CliError::Config(format!(
                        "environment variable {API_KEY_ENV} is required for the remote backend"
                    ))
                })?;
                let mut remote = RemoteConfig::new(base_url, api_key);
                remote.completions_path = self.backend.completions_path.clone();
                remote.fine_tunes_path = self.backend.fine_tunes_path.clone();
                remote.timeout = Duration::from_millis(self.backend.timeout_ms);
                remote.in_flight = self.backend.in_flight;
                remote.retry = RetryPolicy {
                    base_delay: Duration::from_millis(self.backend.base_delay_ms),
                    factor: self.backend.backoff_factor,
                    max_attempts: self.backend.max_attempts,
                };
                Ok(Box::new(RemoteBackend::new(remote)?))
            }
        }
    }

    /// The generator model id for a concept type, or a config error naming
    /// the missing key.
    pub fn generator_model(&self, concept_type: ConceptType) -> Result<&str, CliError> {
        let (id, key) = match concept_type {
            ConceptType::Type1 => (&self.models.gen1, "models.gen1"),
            ConceptType::Type2 => (&self.models.gen2, "models.gen2"),
            ConceptType::Type3 => (&self.models.gen3, "models.gen3"),
        };
        id.as_deref()
            .ok_or_else(|| CliError::Config(format!("config key {key} is required")))
    }

    /// All three evaluator model ids, or a config error naming the first
    /// missing key.
    pub fn evaluator_models(&self) -> Result<EvaluatorModels, CliError> {
        let require = |id: &Option<String>, key: &str| {
            id.clone()
                .ok_or_else(|| CliError::Config(format!("config key {key} is required")))
        };
        Ok(EvaluatorModels {
            nature_solution: require(&self.models.eval_bio, "models.eval_bio")?,
            problem_solution_benefits: require(&self.models.eval_ben, "models.eval_ben")?,
            problem_solution_challenge: require(&self.models.eval_cha, "models.eval_cha")?,
        })
    }

    /// The configured stopword set (file if given, built-in default
    /// otherwise).
    pub fn load_stopwords(&self) -> Result<std::collections::BTreeSet<String>, CliError> {
        match &self.stopwords_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|source| crate::error::io_error(path, source))?;
                Ok(bidforge::text::parse_stopwords(&text))
            }
            None => Ok(bidforge::text::default_stopwords().clone()),
        }
    }

    /// The configured source-category lexicon (file if given, built-in
    /// default otherwise).
    pub fn load_lexicon(&self) -> Result<bidforge::concept::Lexicon, CliError> {
        match &self.lexicon_path {
            Some(path) => Ok(bidforge::concept::Lexicon::load(path)?),
            None => Ok(bidforge::concept::Lexicon::default_lexicon().clone()),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("{key}: cannot parse {value:?}: {e}")))
}

fn parse_or<T: std::str::FromStr>(
    key: &str,
    value: Option<String>,
    default: T,
) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    match value {
        Some(v) => parse_value(key, &v),
        None => Ok(default),
    }
}
