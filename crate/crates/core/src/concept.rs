//! Concept generation: from a problem description to parsed, tagged concepts.
//!
//! A [`ProblemSpec`] names one of three looseness levels — applications only,
//! benefits plus applications, or a full challenge statement — and renders the
//! matching generator prompt. [`generate_concepts`] samples completions from a
//! backend until it has the requested number of parseable concepts or exhausts
//! a retry budget; completions that fail parsing are kept as rejects for
//! audit, never silently dropped. [`categorize_source`] tags each concept's
//! biological inspiration with a coarse category using an editable term
//! lexicon.

use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendError, CompletionRequest};
use crate::datagen::templates;
use crate::text;

/// The default source-category lexicon shipped with the crate.
pub const DEFAULT_LEXICON_FILE: &str = include_str!("../data/lexicon.txt");

/// A problem description at one of three looseness levels.
///
/// The variants map one-to-one onto the three generator models: the looser
/// the description, the more open the problem space the generator explores.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    /// Loosest: application keywords only.
    Type1 { applications: Vec<String> },
    /// Benefits keywords plus application keywords.
    Type2 {
        benefits: Vec<String>,
        applications: Vec<String>,
    },
    /// Tightest: a full challenge statement.
    Type3 { challenge: String },
}

impl ProblemSpec {
    pub fn concept_type(&self) -> ConceptType {
        match self {
            ProblemSpec::Type1 { .. } => ConceptType::Type1,
            ProblemSpec::Type2 { .. } => ConceptType::Type2,
            ProblemSpec::Type3 { .. } => ConceptType::Type3,
        }
    }

    /// Checks the variant's invariants: keyword lists non-empty and
    /// non-blank, challenge non-blank.
    pub fn validate(&self) -> Result<(), ConceptError> {
        let invalid = |reason: &str| ConceptError::InvalidSpec {
            reason: reason.to_string(),
        };
        let check_list = |list: &[String], name: &str| {
            if list.is_empty() || list.iter().any(|k| k.trim().is_empty()) {
                Err(invalid(&format!("{name} must be a non-empty keyword list")))
            } else {
                Ok(())
            }
        };
        match self {
            ProblemSpec::Type1 { applications } => check_list(applications, "applications"),
            ProblemSpec::Type2 {
                benefits,
                applications,
            } => {
                check_list(benefits, "benefits")?;
                check_list(applications, "applications")
            }
            ProblemSpec::Type3 { challenge } => {
                if challenge.trim().is_empty() {
                    Err(invalid("challenge must be non-empty"))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Renders the generator prompt for this spec.
    pub fn prompt(&self) -> String {
        match self {
            ProblemSpec::Type1 { applications } => templates::gen1_prompt(applications),
            ProblemSpec::Type2 {
                benefits,
                applications,
            } => templates::gen2_prompt(benefits, applications),
            ProblemSpec::Type3 { challenge } => templates::gen3_prompt(challenge),
        }
    }
}

/// The generator type a spec or concept belongs to.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum ConceptType {
    Type1,
    Type2,
    Type3,
}

impl ConceptType {
    pub const ALL: [ConceptType; 3] = [ConceptType::Type1, ConceptType::Type2, ConceptType::Type3];

    pub fn slug(self) -> &'static str {
        match self {
            ConceptType::Type1 => "type1",
            ConceptType::Type2 => "type2",
            ConceptType::Type3 => "type3",
        }
    }

    /// The dataset/model kind that generates concepts of this type.
    pub fn model_kind(self) -> crate::datagen::ModelKind {
        match self {
            ConceptType::Type1 => crate::datagen::ModelKind::Gen1,
            ConceptType::Type2 => crate::datagen::ModelKind::Gen2,
            ConceptType::Type3 => crate::datagen::ModelKind::Gen3,
        }
    }
}

impl std::fmt::Display for ConceptType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

/// Coarse category of the biological system a concept draws on.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum SourceCategory {
    Bird,
    Insect,
    Mammal,
    Fish,
    Reptile,
    Plant,
    Microorganism,
    /// No lexicon term matched.
    Other,
}

impl SourceCategory {
    pub const ALL: [SourceCategory; 8] = [
        SourceCategory::Bird,
        SourceCategory::Insect,
        SourceCategory::Mammal,
        SourceCategory::Fish,
        SourceCategory::Reptile,
        SourceCategory::Plant,
        SourceCategory::Microorganism,
        SourceCategory::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SourceCategory::Bird => "bird",
            SourceCategory::Insect => "insect",
            SourceCategory::Mammal => "mammal",
            SourceCategory::Fish => "fish",
            SourceCategory::Reptile => "reptile",
            SourceCategory::Plant => "plant",
            SourceCategory::Microorganism => "microorganism",
            SourceCategory::Other => "other",
        }
    }

    /// Parses a lexicon category label. `other` is not a valid label: it is
    /// the implicit fallback, never a term list.
    fn from_label(label: &str) -> Option<SourceCategory> {
        SourceCategory::ALL
            .into_iter()
            .filter(|c| *c != SourceCategory::Other)
            .find(|c| c.as_str() == label)
    }
}

impl std::fmt::Display for SourceCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One generated, parsed design concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratedConcept {
    /// Opaque id, unique within one store.
    pub id: String,
    /// The problem description the concept was generated for.
    pub spec: ProblemSpec,
    /// The biological mechanism section of the completion.
    pub biomimicry: String,
    /// The engineering concept section of the completion.
    pub innovation: String,
    /// The untouched completion text, for audit; re-parsing it yields the
    /// two sections above.
    pub raw_completion: String,
    /// Model id that produced the completion.
    pub model: String,
    /// Sampling temperature used.
    pub temperature: f64,
    /// Caller-supplied logical timestamp; using a fixed value keeps stores
    /// byte-identical across reruns.
    pub created_at: i64,
    /// Lexicon tag, if [`categorize_source`] has run.
    pub source_category: Option<SourceCategory>,
}

/// A completion that failed to parse, kept for audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedCompletion {
    /// Zero-based index of the attempt that produced this completion.
    pub sample_index: usize,
    pub raw: String,
    pub reason: String,
}

/// Everything one generation run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOutcome {
    pub concepts: Vec<GeneratedConcept>,
    pub rejects: Vec<RejectedCompletion>,
    /// Completions sampled in total (accepted + rejected).
    pub attempts: usize,
    pub requested: usize,
}

/// Knobs for one generation run.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationParams {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: usize,
    /// Maximum completions to sample before giving up; defaults to twice the
    /// requested concept count.
    pub budget: Option<usize>,
    /// Logical timestamp stamped on every concept.
    pub created_at: i64,
    /// Concept id prefix; defaults to the spec's type slug.
    pub id_prefix: Option<String>,
}

impl GenerationParams {
    pub fn new(model: impl Into<String>) -> Self {
        GenerationParams {
            model: model.into(),
            temperature: crate::backend::DEFAULT_GENERATION_TEMPERATURE,
            max_tokens: crate::backend::DEFAULT_MAX_TOKENS,
            budget: None,
            created_at: 0,
            id_prefix: None,
        }
    }
}

/// The two completion sections, used in parse errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Biomimicry,
    Innovation,
}

impl std::fmt::Display for Section {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Section::Biomimicry => "biomimicry",
            Section::Innovation => "innovation",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConceptError {
    #[error("invalid problem spec: {reason}")]
    InvalidSpec { reason: String },
    #[error("requested concept count must be at least 1")]
    InvalidCount,
    #[error("completion is missing its {section} section")]
    MissingSection { section: Section },
    #[error("completion places its innovation section before its biomimicry section")]
    OutOfOrder,
    #[error("backend: {0}")]
    Backend(#[from] BackendError),
    #[error("generation budget exhausted after {attempts} attempts: obtained {obtained} of {requested} concepts")]
    BudgetExhausted {
        obtained: usize,
        requested: usize,
        attempts: usize,
        /// What the run did produce; callers should persist it.
        partial: Box<GenerationOutcome>,
    },
    #[error("bad lexicon at line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad concept store at line {line}: {message}")]
    Store { line: usize, message: String },
}

const BIOMIMICRY_HEADER: &str = "Biomimicry:";
const INNOVATION_HEADER: &str = "Innovation:";

/// Splits a generator completion into its biomimicry and innovation bodies.
///
/// Splitting is on the first occurrence of each literal section header, in
/// that order; the trailing end marker is dropped if present and both bodies
/// are whitespace-trimmed. A header that is absent — or present with an
/// empty body — yields [`ConceptError::MissingSection`]; an innovation
/// header before the biomimicry header yields [`ConceptError::OutOfOrder`].
pub fn parse_completion(text: &str) -> Result<(String, String), ConceptError> {
    let bio_idx = text.find(BIOMIMICRY_HEADER);
    let inno_idx = text.find(INNOVATION_HEADER);
    let (bio_idx, inno_idx) = match (bio_idx, inno_idx) {
        (Some(b), Some(i)) if i < b => return Err(ConceptError::OutOfOrder),
        (Some(b), Some(i)) => (b, i),
        (None, _) => {
            return Err(ConceptError::MissingSection {
                section: Section::Biomimicry,
            })
        }
        (_, None) => {
            return Err(ConceptError::MissingSection {
                section: Section::Innovation,
            })
        }
    };
    let biomimicry = text[bio_idx + BIOMIMICRY_HEADER.len()..inno_idx].trim();
    let innovation = text[inno_idx + INNOVATION_HEADER.len()..].trim();
    let innovation = innovation
        .strip_suffix("[END]")
        .map(str::trim)
        .unwrap_or(innovation);
    if biomimicry.is_empty() {
        return Err(ConceptError::MissingSection {
            section: Section::Biomimicry,
        });
    }
    if innovation.is_empty() {
        return Err(ConceptError::MissingSection {
            section: Section::Innovation,
        });
    }
    Ok((biomimicry.to_string(), innovation.to_string()))
}

/// Samples completions for `spec` until `n` concepts parse or the budget
/// (default `2n` attempts) runs out.
///
/// The budget is a hard cap on sampled completions, honored even when it is
/// smaller than `n`. Concepts are ordered by sample index, so a
/// deterministic backend yields a deterministic outcome. Failed parses
/// become [`RejectedCompletion`]s in the outcome rather than errors. Running
/// out of budget returns [`ConceptError::BudgetExhausted`] carrying the
/// partial outcome.
pub fn generate_concepts(
    spec: &ProblemSpec,
    n: usize,
    backend: &dyn Backend,
    params: &GenerationParams,
) -> Result<GenerationOutcome, ConceptError> {
    spec.validate()?;
    if n == 0 {
        return Err(ConceptError::InvalidCount);
    }
    let budget = params.budget.unwrap_or(2 * n);
    let prompt = spec.prompt();
    let id_prefix = params
        .id_prefix
        .clone()
        .unwrap_or_else(|| spec.concept_type().slug().to_string());

    let mut concepts = Vec::new();
    let mut rejects = Vec::new();
    let mut attempts = 0usize;
    while concepts.len() < n && attempts < budget {
        let batch = (n - concepts.len()).min(budget - attempts);
        let request = CompletionRequest::new(&params.model, &prompt)
            .with_n(batch)
            .with_temperature(params.temperature)
            .with_max_tokens(params.max_tokens);
        let response = backend.complete(&request)?;
        if response.texts.len() != batch {
            return Err(ConceptError::Backend(BackendError::MalformedResponse {
                reason: format!(
                    "requested {batch} completions, received {}",
                    response.texts.len()
                ),
            }));
        }
        for raw in response.texts {
            let sample_index = attempts;
            attempts += 1;
            match parse_completion(&raw) {
                Ok((biomimicry, innovation)) => concepts.push(GeneratedConcept {
                    id: format!("{id_prefix}-{:04}", concepts.len()),
                    spec: spec.clone(),
                    biomimicry,
                    innovation,
                    raw_completion: raw,
                    model: params.model.clone(),
                    temperature: params.temperature,
                    created_at: params.created_at,
                    source_category: None,
                }),
                Err(e) => rejects.push(RejectedCompletion {
                    sample_index,
                    raw,
                    reason: e.to_string(),
                }),
            }
        }
    }

    let outcome = GenerationOutcome {
        concepts,
        rejects,
        attempts,
        requested: n,
    };
    if outcome.concepts.len() < n {
        return Err(ConceptError::BudgetExhausted {
            obtained: outcome.concepts.len(),
            requested: n,
            attempts,
            partial: Box::new(outcome),
        });
    }
    Ok(outcome)
}

/// A category lexicon: terms (single words or phrases) mapped to source
/// categories, with the file's category order kept as the tie-break order.
#[derive(Debug, Clone)]
pub struct Lexicon {
    /// Terms as lowercase token sequences, sorted longest-first so matching
    /// can take the first hit at each position.
    terms: Vec<LexiconTerm>,
    /// Categories in first-appearance order.
    category_order: Vec<SourceCategory>,
}

#[derive(Debug, Clone)]
struct LexiconTerm {
    tokens: Vec<String>,
    /// Position of the term's category in `category_order`; doubles as the
    /// tie-break order.
    rank: usize,
}

impl Lexicon {
    /// Parses the `category: term, term` format; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Lexicon, ConceptError> {
        let err = |line: usize, message: &str| ConceptError::Lexicon {
            line,
            message: message.to_string(),
        };
        let mut terms = Vec::new();
        let mut category_order: Vec<SourceCategory> = Vec::new();
        for (i, raw_line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((label, term_list)) = line.split_once(':') else {
                return Err(err(line_no, "expected \"category: term, term, ...\""));
            };
            let label = label.trim().to_lowercase();
            let Some(category) = SourceCategory::from_label(&label) else {
                return Err(err(line_no, &format!("unknown category {label:?}")));
            };
            let rank = match category_order.iter().position(|c| *c == category) {
                Some(r) => r,
                None => {
                    category_order.push(category);
                    category_order.len() - 1
                }
            };
            for term in term_list.split(',') {
                let tokens = text::tokenize(term);
                if tokens.is_empty() {
                    return Err(err(line_no, "empty term"));
                }
                terms.push(LexiconTerm { tokens, rank });
            }
        }
        if terms.is_empty() {
            return Err(err(1, "lexicon defines no terms"));
        }
        // Longest phrases first so matching is maximal; rank then input
        // order break ties deterministically.
        let mut indexed: Vec<(usize, LexiconTerm)> = terms.into_iter().enumerate().collect();
        indexed.sort_by(|(ia, a), (ib, b)| {
            b.tokens
                .len()
                .cmp(&a.tokens.len())
                .then(a.rank.cmp(&b.rank))
                .then(ia.cmp(ib))
        });
        Ok(Lexicon {
            terms: indexed.into_iter().map(|(_, t)| t).collect(),
            category_order,
        })
    }

    /// Loads a lexicon from a file.
    pub fn load(path: &Path) -> Result<Lexicon, ConceptError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConceptError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Lexicon::parse(&text)
    }

    /// The built-in lexicon, parsed once.
    pub fn default_lexicon() -> &'static Lexicon {
        static LEXICON: OnceLock<Lexicon> = OnceLock::new();
        LEXICON.get_or_init(|| {
            Lexicon::parse(DEFAULT_LEXICON_FILE).expect("the shipped lexicon parses")
        })
    }

    /// Longest term (in tokens) matching at `position`, if any.
    fn match_at(&self, tokens: &[String], position: usize) -> Option<&LexiconTerm> {
        self.terms.iter().find(|term| {
            tokens.len() - position >= term.tokens.len()
                && term
                    .tokens
                    .iter()
                    .zip(&tokens[position..])
                    .all(|(w, t)| token_matches(w, t))
        })
    }
}

/// Whether text token `t` matches lexicon token `w`, folding naive plurals
/// ("geckos" matches "gecko"). Both sides are already lowercase.
fn token_matches(w: &str, t: &str) -> bool {
    t == w
        || (t.len() == w.len() + 1 && t.starts_with(w) && t.ends_with('s'))
        || (t.len() == w.len() + 2 && t.starts_with(w) && t.ends_with("es"))
}

/// Tags the biological source of a text: the category whose lexicon terms
/// score the most matches, scanning left to right with longest-match (a
/// matched phrase consumes its words). Ties go to the category listed first
/// in the lexicon; no matches at all yield [`SourceCategory::Other`].
pub fn categorize_source(biomimicry: &str, lexicon: &Lexicon) -> SourceCategory {
    let tokens = text::tokenize(biomimicry);
    let mut hits = vec![0usize; lexicon.category_order.len()];
    let mut i = 0;
    while i < tokens.len() {
        match lexicon.match_at(&tokens, i) {
            Some(term) => {
                hits[term.rank] += 1;
                i += term.tokens.len();
            }
            None => i += 1,
        }
    }
    let mut best: Option<(usize, usize)> = None; // (rank, count)
    for (rank, &count) in hits.iter().enumerate() {
        if count > 0 && best.is_none_or(|(_, c)| count > c) {
            best = Some((rank, count));
        }
    }
    match best {
        Some((rank, _)) => lexicon.category_order[rank],
        None => SourceCategory::Other,
    }
}

/// Tags every concept in place with its source category.
pub fn tag_source_categories(concepts: &mut [GeneratedConcept], lexicon: &Lexicon) {
    for concept in concepts {
        concept.source_category = Some(categorize_source(&concept.biomimicry, lexicon));
    }
}

/// Writes a concept store: JSON-lines, one concept per line, trailing
/// newline. Returns the number written.
pub fn save_concepts(concepts: &[GeneratedConcept], path: &Path) -> Result<usize, ConceptError> {
    let io_err = |source: std::io::Error| ConceptError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut writer = std::io::BufWriter::new(file);
    for concept in concepts {
        let line = serde_json::to_string(concept).expect("concepts always serialize");
        writer.write_all(line.as_bytes()).map_err(io_err)?;
        writer.write_all(b"\n").map_err(io_err)?;
    }
    writer.flush().map_err(io_err)?;
    Ok(concepts.len())
}

/// Reads a concept store written by [`save_concepts`].
pub fn load_concepts(path: &Path) -> Result<Vec<GeneratedConcept>, ConceptError> {
    let file = std::fs::File::open(path).map_err(|source| ConceptError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = std::io::BufReader::new(file);
    let mut concepts = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| ConceptError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.is_empty() {
            continue;
        }
        let concept: GeneratedConcept =
            serde_json::from_str(&line).map_err(|e| ConceptError::Store {
                line: i + 1,
                message: e.to_string(),
            })?;
        concepts.push(concept);
    }
    Ok(concepts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{
        ClassificationResult, CompletionResponse, FineTuneJob, MockBackend,
    };
    use crate::corpus::InnovationRecord;

    fn flying_car_spec() -> ProblemSpec {
        ProblemSpec::Type1 {
            applications: vec!["Flying car".to_string()],
        }
    }

    fn corpus() -> Vec<InnovationRecord> {
        (0..6)
            .map(|i| InnovationRecord {
                id: format!("r{i}"),
                benefits: vec!["Lightweight".to_string()],
                applications: vec!["Flying car".to_string()],
                challenge: "Reduce mass.".to_string(),
                innovation: format!("Innovation {i} uses a hollow strut lattice."),
                biomimicry: format!("Organism {i} has hollow bones."),
            })
            .collect()
    }

    #[test]
    fn parse_recovers_the_two_sections() {
        let (bio, inno) = parse_completion(" Biomimicry: A\n\nInnovation: B\n[END]").unwrap();
        assert_eq!(bio, "A");
        assert_eq!(inno, "B");
    }

    #[test]
    fn parse_tolerates_a_missing_end_marker() {
        let (bio, inno) = parse_completion(" Biomimicry: A\n\nInnovation: B").unwrap();
        assert_eq!((bio.as_str(), inno.as_str()), ("A", "B"));
    }

    #[test]
    fn parse_reports_the_missing_section() {
        match parse_completion("Innovation: B").unwrap_err() {
            ConceptError::MissingSection { section } => {
                assert_eq!(section, Section::Biomimicry)
            }
            other => panic!("expected missing-section, got {other}"),
        }
        match parse_completion("Biomimicry: A only").unwrap_err() {
            ConceptError::MissingSection { section } => {
                assert_eq!(section, Section::Innovation)
            }
            other => panic!("expected missing-section, got {other}"),
        }
    }

    #[test]
    fn parse_rejects_reversed_sections() {
        assert!(matches!(
            parse_completion("Innovation: B\n\nBiomimicry: A").unwrap_err(),
            ConceptError::OutOfOrder
        ));
    }

    #[test]
    fn parse_rejects_an_empty_section_body() {
        assert!(matches!(
            parse_completion(" Biomimicry: \n\nInnovation: B").unwrap_err(),
            ConceptError::MissingSection {
                section: Section::Biomimicry
            }
        ));
    }

    #[test]
    fn parse_inverts_the_completion_template() {
        for record in corpus() {
            let rendered = templates::render_completion(&record);
            let (bio, inno) = parse_completion(&rendered).unwrap();
            assert_eq!(bio, record.biomimicry);
            assert_eq!(inno, record.innovation);
        }
    }

    #[test]
    fn specs_validate_their_variant_invariants() {
        assert!(flying_car_spec().validate().is_ok());
        assert!(ProblemSpec::Type1 {
            applications: vec![]
        }
        .validate()
        .is_err());
        assert!(ProblemSpec::Type2 {
            benefits: vec!["  ".to_string()],
            applications: vec!["Flying car".to_string()],
        }
        .validate()
        .is_err());
        assert!(ProblemSpec::Type3 {
            challenge: "".to_string()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn spec_prompts_match_the_generator_templates() {
        assert_eq!(flying_car_spec().prompt(), "Application: Flying car\n\n###\n\n");
        let type2 = ProblemSpec::Type2 {
            benefits: vec!["Lightweight".to_string()],
            applications: vec!["Flying car".to_string()],
        };
        assert_eq!(
            type2.prompt(),
            "Benefits: Lightweight\nApplication: Flying car\n\n###\n\n"
        );
        let type3 = ProblemSpec::Type3 {
            challenge: "Lightweight design is a challenge for flying cars.".to_string(),
        };
        assert_eq!(
            type3.prompt(),
            "Challenge: Lightweight design is a challenge for flying cars.\n\n###\n\n"
        );
    }

    #[test]
    fn spec_serialization_is_kind_tagged() {
        let json = serde_json::to_string(&flying_car_spec()).unwrap();
        assert!(json.contains("\"kind\":\"type1\""), "{json}");
        let back: ProblemSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, flying_car_spec());
    }

    #[test]
    fn generation_fills_the_request_from_the_mock() {
        let backend = MockBackend::with_standard_models(corpus(), 11);
        let params = GenerationParams::new("mock/gen1");
        let outcome = generate_concepts(&flying_car_spec(), 5, &backend, &params).unwrap();
        assert_eq!(outcome.concepts.len(), 5);
        assert_eq!(outcome.attempts, 5);
        assert!(outcome.rejects.is_empty());
        for (i, concept) in outcome.concepts.iter().enumerate() {
            assert_eq!(concept.id, format!("type1-{i:04}"));
            assert_eq!(concept.spec, flying_car_spec());
            assert!(!concept.biomimicry.is_empty());
            assert!(!concept.innovation.is_empty());
            assert_eq!(concept.model, "mock/gen1");
            assert_eq!(concept.created_at, 0);
            let (bio, inno) = parse_completion(&concept.raw_completion).unwrap();
            assert_eq!(bio, concept.biomimicry);
            assert_eq!(inno, concept.innovation);
        }
    }

    #[test]
    fn an_explicit_budget_below_n_is_honored_not_clamped() {
        let backend = MockBackend::with_standard_models(corpus(), 11);
        let mut params = GenerationParams::new("mock/gen1");
        params.budget = Some(2);
        match generate_concepts(&flying_car_spec(), 5, &backend, &params).unwrap_err() {
            ConceptError::BudgetExhausted {
                obtained,
                requested,
                attempts,
                partial,
            } => {
                assert_eq!(obtained, 2);
                assert_eq!(requested, 5);
                assert_eq!(attempts, 2);
                assert_eq!(partial.concepts.len(), 2);
                assert!(partial.rejects.is_empty());
            }
            other => panic!("expected budget exhaustion, got {other}"),
        }
    }

    #[test]
    fn generation_is_deterministic_for_a_fixed_seed() {
        let params = GenerationParams::new("mock/gen2");
        let spec = ProblemSpec::Type2 {
            benefits: vec!["Lightweight".to_string()],
            applications: vec!["Flying car".to_string()],
        };
        let a = generate_concepts(
            &spec,
            4,
            &MockBackend::with_standard_models(corpus(), 3),
            &params,
        )
        .unwrap();
        let b = generate_concepts(
            &spec,
            4,
            &MockBackend::with_standard_models(corpus(), 3),
            &params,
        )
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_requested_concepts_is_an_error() {
        let backend = MockBackend::with_standard_models(corpus(), 0);
        assert!(matches!(
            generate_concepts(
                &flying_car_spec(),
                0,
                &backend,
                &GenerationParams::new("mock/gen1")
            )
            .unwrap_err(),
            ConceptError::InvalidCount
        ));
    }

    /// A backend whose completions never parse, to exercise the budget.
    struct GarbageBackend;

    impl Backend for GarbageBackend {
        fn complete(
            &self,
            request: &CompletionRequest,
        ) -> Result<CompletionResponse, BackendError> {
            Ok(CompletionResponse {
                texts: vec!["no sections here".to_string(); request.n],
                token_logprobs: None,
            })
        }
        fn classify(&self, _: &str, _: &str) -> Result<ClassificationResult, BackendError> {
            unimplemented!()
        }
        fn submit_finetune(&self, _: &FineTuneJob) -> Result<String, BackendError> {
            unimplemented!()
        }
        fn poll_finetune(&self, _: &str) -> Result<FineTuneJob, BackendError> {
            unimplemented!()
        }
    }

    #[test]
    fn exhausted_budget_carries_the_partial_outcome() {
        let err = generate_concepts(
            &flying_car_spec(),
            4,
            &GarbageBackend,
            &GenerationParams::new("m"),
        )
        .unwrap_err();
        match err {
            ConceptError::BudgetExhausted {
                obtained,
                requested,
                attempts,
                partial,
            } => {
                assert_eq!(obtained, 0);
                assert_eq!(requested, 4);
                assert_eq!(attempts, 8);
                assert!(partial.concepts.is_empty());
                assert_eq!(partial.rejects.len(), 8);
                assert!(partial.rejects[0].reason.contains("biomimicry"));
            }
            other => panic!("expected budget exhaustion, got {other}"),
        }
    }

    #[test]
    fn the_shipped_lexicon_parses() {
        let lexicon = Lexicon::default_lexicon();
        assert_eq!(lexicon.category_order.len(), 7);
        assert_eq!(lexicon.category_order[0], SourceCategory::Bird);
    }

    #[test]
    fn categorization_matches_known_organisms() {
        let lexicon = Lexicon::default_lexicon();
        assert_eq!(
            categorize_source("Pterosaurs had hollow wing bones.", lexicon),
            SourceCategory::Reptile
        );
        assert_eq!(
            categorize_source("Hummingbirds are lightweight and agile.", lexicon),
            SourceCategory::Bird
        );
        assert_eq!(
            categorize_source("Geckos cling to glass walls.", lexicon),
            SourceCategory::Reptile
        );
        assert_eq!(
            categorize_source("Carbon fiber panels cut weight.", lexicon),
            SourceCategory::Other
        );
    }

    #[test]
    fn longest_phrase_wins_over_its_prefix_word() {
        let lexicon = Lexicon::default_lexicon();
        // "pelican eel" (fish) must beat "pelican" (bird).
        assert_eq!(
            categorize_source("The pelican eel has a huge mouth.", lexicon),
            SourceCategory::Fish
        );
        assert_eq!(
            categorize_source("The pelican scoops water.", lexicon),
            SourceCategory::Bird
        );
    }

    #[test]
    fn ties_break_by_lexicon_category_order() {
        let lexicon = Lexicon::parse("insect: ant\nbird: owl\n").unwrap();
        // One hit each; insect is listed first in THIS lexicon.
        assert_eq!(
            categorize_source("An owl hunts an ant.", &lexicon),
            SourceCategory::Insect
        );
    }

    #[test]
    fn majority_hits_beat_tiebreak_order() {
        let lexicon = Lexicon::default_lexicon();
        assert_eq!(
            categorize_source("A bird watches two ants carry a third ant.", lexicon),
            SourceCategory::Insect
        );
    }

    #[test]
    fn bad_lexicon_lines_are_rejected_with_line_numbers() {
        match Lexicon::parse("# ok\nbird owl\n").unwrap_err() {
            ConceptError::Lexicon { line, .. } => assert_eq!(line, 2),
            other => panic!("expected lexicon error, got {other}"),
        }
        match Lexicon::parse("dragon: smaug\n").unwrap_err() {
            ConceptError::Lexicon { line, message } => {
                assert_eq!(line, 1);
                assert!(message.contains("dragon"));
            }
            other => panic!("expected lexicon error, got {other}"),
        }
        assert!(Lexicon::parse("# only comments\n").is_err());
    }

    #[test]
    fn tagging_fills_every_category_slot() {
        let backend = MockBackend::with_standard_models(corpus(), 5);
        let mut outcome = generate_concepts(
            &flying_car_spec(),
            3,
            &backend,
            &GenerationParams::new("mock/gen1"),
        )
        .unwrap();
        tag_source_categories(&mut outcome.concepts, Lexicon::default_lexicon());
        assert!(outcome.concepts.iter().all(|c| c.source_category.is_some()));
    }

    #[test]
    fn concept_store_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("concepts.jsonl");
        let backend = MockBackend::with_standard_models(corpus(), 2);
        let outcome = generate_concepts(
            &flying_car_spec(),
            4,
            &backend,
            &GenerationParams::new("mock/gen1"),
        )
        .unwrap();
        assert_eq!(save_concepts(&outcome.concepts, &path).unwrap(), 4);
        let loaded = load_concepts(&path).unwrap();
        assert_eq!(loaded, outcome.concepts);

        // Same content, same bytes.
        let first = std::fs::read(&path).unwrap();
        save_concepts(&outcome.concepts, &path).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }

    #[test]
    fn malformed_store_lines_name_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.jsonl");
        std::fs::write(&path, "{\"not\": \"a concept\"}\n").unwrap();
        match load_concepts(&path).unwrap_err() {
            ConceptError::Store { line, .. } => assert_eq!(line, 1),
            other => panic!("expected store error, got {other}"),
        }
    }
}
