//! Toolkit for bio-inspired design (BID) concept pipelines.
//!
//! The crate covers the full path from a curated innovation corpus to
//! screened, measured design concepts:
//!
//! * [`corpus`] loads and validates innovation records (JSON or CSV).
//! * [`datagen`] compiles the corpus into prompt/completion fine-tuning
//!   datasets for three concept generators, a random-innovation generator,
//!   and three relevancy evaluators, with deterministic train/validation
//!   splits.
//! * [`backend`] defines the language-model backend contract plus a remote
//!   HTTP implementation and a fully deterministic mock.
//! * [`concept`] turns problem descriptions into generated concepts and
//!   parses raw completions back into structured fields.
//! * [`relevancy`] screens concepts with the evaluator models and reports
//!   pass-rate tables.
//! * [`diversity`] measures concept diversity with exact Word Mover's
//!   Distance over word embeddings.
//!
//! Everything downstream of a fixed seed is deterministic: the mock backend,
//! dataset splits, generation, and the transport solver all produce
//! byte-identical artifacts for identical inputs.

pub mod backend;
pub mod concept;
pub mod corpus;
pub mod datagen;
pub mod diversity;
pub mod relevancy;
pub mod text;

pub use backend::{
    Backend, BackendError, ClassificationResult, CompletionRequest, CompletionResponse,
    FineTuneJob, Label, MockBackend, RemoteBackend,
};
pub use concept::{ConceptError, ConceptType, GeneratedConcept, ProblemSpec, SourceCategory};
pub use corpus::{Corpus, CorpusError, CorpusFormat, InnovationRecord};
pub use datagen::{DatagenError, FineTuneExample, LabeledDataset, ModelKind, SplitConfig};
pub use diversity::{
    DiversityError, DiversityReport, EmbeddingStore, NBowDocument, TransportPlan,
};
pub use relevancy::{EvaluatorKind, PassRateTable, RelevancyError, RelevancyVerdict};
