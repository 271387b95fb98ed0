//! Relevancy screening of generated concepts.
//!
//! Each concept is judged by up to two binary evaluators: nature–solution
//! (does the innovation take inspiration from the biomimicry?) for every
//! concept, and problem–solution (does the innovation address the benefits /
//! the challenge?) for Type-2 and Type-3 concepts. Type-1 concepts have an
//! open problem space, so problem–solution relevancy is undefined for them —
//! absent, not failed.
//!
//! A verdict is `related` exactly when its probability is at least
//! [`CLASSIFICATION_THRESHOLD`](crate::backend::CLASSIFICATION_THRESHOLD);
//! the threshold is a fixed constant, not a knob, so pass rates stay
//! comparable across runs. Pass-rate tables count a concept as passing
//! overall only when every evaluator applicable to its type says related.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendError, ClassificationResult};
use crate::concept::{ConceptType, GeneratedConcept, ProblemSpec};
use crate::datagen::templates;

/// Number of bins in a probability histogram.
pub const HISTOGRAM_BINS: usize = 20;

/// The three evaluator roles.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum EvaluatorKind {
    NatureSolution,
    ProblemSolutionBenefits,
    ProblemSolutionChallenge,
}

impl EvaluatorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EvaluatorKind::NatureSolution => "nature_solution",
            EvaluatorKind::ProblemSolutionBenefits => "problem_solution_benefits",
            EvaluatorKind::ProblemSolutionChallenge => "problem_solution_challenge",
        }
    }

    fn from_str(s: &str) -> Option<EvaluatorKind> {
        [
            EvaluatorKind::NatureSolution,
            EvaluatorKind::ProblemSolutionBenefits,
            EvaluatorKind::ProblemSolutionChallenge,
        ]
        .into_iter()
        .find(|k| k.as_str() == s)
    }

    /// The dataset/model kind that backs this evaluator.
    pub fn model_kind(self) -> crate::datagen::ModelKind {
        match self {
            EvaluatorKind::NatureSolution => crate::datagen::ModelKind::EvalBio,
            EvaluatorKind::ProblemSolutionBenefits => crate::datagen::ModelKind::EvalBen,
            EvaluatorKind::ProblemSolutionChallenge => crate::datagen::ModelKind::EvalCha,
        }
    }
}

impl std::fmt::Display for EvaluatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluator's judgment of one concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelevancyVerdict {
    pub concept_id: String,
    pub evaluator: EvaluatorKind,
    /// Classifier confidence that the pair is related, in `[0, 1]`.
    pub probability: f64,
    /// `probability >= 0.5`, stored explicitly for the CSV interchange.
    pub related: bool,
}

impl RelevancyVerdict {
    fn from_classification(
        concept_id: &str,
        evaluator: EvaluatorKind,
        result: ClassificationResult,
    ) -> Self {
        RelevancyVerdict {
            concept_id: concept_id.to_string(),
            evaluator,
            probability: result.probability,
            related: result.label == crate::backend::Label::Related,
        }
    }
}

/// Model ids for the three evaluators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluatorModels {
    pub nature_solution: String,
    pub problem_solution_benefits: String,
    pub problem_solution_challenge: String,
}

impl EvaluatorModels {
    /// The ids registered by the mock backend's standard set.
    pub fn mock_defaults() -> Self {
        EvaluatorModels {
            nature_solution: "mock/eval-bio".to_string(),
            problem_solution_benefits: "mock/eval-ben".to_string(),
            problem_solution_challenge: "mock/eval-cha".to_string(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RelevancyError {
    #[error("backend failed on concept {concept_id}: {source}")]
    Backend {
        concept_id: String,
        source: BackendError,
    },
    #[error("concept {concept_id} has no {evaluator} verdict")]
    MissingVerdict {
        concept_id: String,
        evaluator: EvaluatorKind,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad verdicts file {path} at line {line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },
}

/// The nature–solution classifier prompt for a concept.
pub fn nature_solution_prompt(concept: &GeneratedConcept) -> String {
    templates::eval_bio_prompt(&concept.biomimicry, &concept.innovation)
}

/// The problem–solution classifier prompt for a concept, along with which
/// evaluator it belongs to; `None` for Type-1 concepts.
pub fn problem_solution_prompt(concept: &GeneratedConcept) -> Option<(EvaluatorKind, String)> {
    match &concept.spec {
        ProblemSpec::Type1 { .. } => None,
        ProblemSpec::Type2 { benefits, .. } => Some((
            EvaluatorKind::ProblemSolutionBenefits,
            templates::eval_ben_prompt(&concept.innovation, benefits),
        )),
        ProblemSpec::Type3 { challenge } => Some((
            EvaluatorKind::ProblemSolutionChallenge,
            templates::eval_cha_prompt(challenge, &concept.innovation),
        )),
    }
}

/// Judges whether a concept's innovation takes inspiration from its
/// biomimicry. Applicable to every concept type.
pub fn evaluate_nature_solution(
    concept: &GeneratedConcept,
    backend: &dyn Backend,
    model: &str,
) -> Result<RelevancyVerdict, RelevancyError> {
    let prompt = nature_solution_prompt(concept);
    let result = backend
        .classify(model, &prompt)
        .map_err(|source| RelevancyError::Backend {
            concept_id: concept.id.clone(),
            source,
        })?;
    Ok(RelevancyVerdict::from_classification(
        &concept.id,
        EvaluatorKind::NatureSolution,
        result,
    ))
}

/// Judges whether a concept's innovation addresses its problem description.
///
/// Type-1 concepts return `Ok(None)`: their problem space is open, so the
/// judgment is undefined rather than failed. Type-2 uses the benefits-side
/// evaluator, Type-3 the challenge-side one.
pub fn evaluate_problem_solution(
    concept: &GeneratedConcept,
    backend: &dyn Backend,
    models: &EvaluatorModels,
) -> Result<Option<RelevancyVerdict>, RelevancyError> {
    let Some((evaluator, prompt)) = problem_solution_prompt(concept) else {
        return Ok(None);
    };
    let model = match evaluator {
        EvaluatorKind::ProblemSolutionBenefits => &models.problem_solution_benefits,
        EvaluatorKind::ProblemSolutionChallenge => &models.problem_solution_challenge,
        EvaluatorKind::NatureSolution => unreachable!(),
    };
    let result = backend
        .classify(model, &prompt)
        .map_err(|source| RelevancyError::Backend {
            concept_id: concept.id.clone(),
            source,
        })?;
    Ok(Some(RelevancyVerdict::from_classification(
        &concept.id,
        evaluator,
        result,
    )))
}

/// Runs every applicable evaluator over every concept.
///
/// Concepts fan out in parallel; the output keeps concept order, with each
/// concept's nature–solution verdict before its problem–solution verdict,
/// so a deterministic backend yields a deterministic verdict list.
pub fn evaluate_concepts(
    concepts: &[GeneratedConcept],
    backend: &dyn Backend,
    models: &EvaluatorModels,
) -> Result<Vec<RelevancyVerdict>, RelevancyError> {
    let per_concept: Vec<Result<Vec<RelevancyVerdict>, RelevancyError>> = concepts
        .par_iter()
        .map(|concept| {
            let mut verdicts = vec![evaluate_nature_solution(
                concept,
                backend,
                &models.nature_solution,
            )?];
            if let Some(verdict) = evaluate_problem_solution(concept, backend, models)? {
                verdicts.push(verdict);
            }
            Ok(verdicts)
        })
        .collect();
    let mut all = Vec::new();
    for result in per_concept {
        all.extend(result?);
    }
    Ok(all)
}

/// One numerator/denominator cell of a pass-rate table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateCell {
    pub passed: usize,
    pub total: usize,
}

impl RateCell {
    pub fn rate(self) -> f64 {
        self.passed as f64 / self.total as f64
    }
}

impl std::fmt::Display for RateCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:.1}% ({}/{})",
            100.0 * self.rate(),
            self.passed,
            self.total
        )
    }
}

/// Pass rates for one concept type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassRateRow {
    pub concept_type: ConceptType,
    pub nature_solution: RateCell,
    /// Absent for Type-1 (open problem space).
    pub problem_solution: Option<RateCell>,
    /// Concepts passing every evaluator applicable to their type.
    pub overall: RateCell,
}

/// Pass rates per concept type; types with no concepts have no row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PassRateTable {
    pub rows: Vec<PassRateRow>,
}

impl PassRateTable {
    pub fn row(&self, t: ConceptType) -> Option<&PassRateRow> {
        self.rows.iter().find(|r| r.concept_type == t)
    }

    /// Renders the table as CSV. Type-1 rows leave the problem–solution
    /// columns empty rather than reporting 0.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "concept_type,nature_solution_passed,nature_solution_total,nature_solution_rate,\
             problem_solution_passed,problem_solution_total,problem_solution_rate,\
             overall_passed,overall_total,overall_rate\n",
        );
        for row in &self.rows {
            let problem = match row.problem_solution {
                Some(c) => format!("{},{},{:.6}", c.passed, c.total, c.rate()),
                None => ",,".to_string(),
            };
            out.push_str(&format!(
                "{},{},{},{:.6},{},{},{},{:.6}\n",
                row.concept_type,
                row.nature_solution.passed,
                row.nature_solution.total,
                row.nature_solution.rate(),
                problem,
                row.overall.passed,
                row.overall.total,
                row.overall.rate(),
            ));
        }
        out
    }
}

impl std::fmt::Display for PassRateTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "{:<8} {:<16} {:<16} {:<16}",
            "type", "nature-solution", "problem-solution", "overall"
        )?;
        for row in &self.rows {
            let problem = match row.problem_solution {
                Some(c) => c.to_string(),
                None => "—".to_string(),
            };
            writeln!(
                f,
                "{:<8} {:<16} {:<16} {:<16}",
                row.concept_type.slug(),
                row.nature_solution.to_string(),
                problem,
                row.overall.to_string(),
            )?;
        }
        Ok(())
    }
}

/// Builds the pass-rate table for a set of concepts and their verdicts.
///
/// Every concept needs a nature–solution verdict; Type-2/3 concepts also
/// need their problem–solution verdict — a gap is
/// [`RelevancyError::MissingVerdict`]. Duplicate verdicts for the same
/// (concept, evaluator) pair: the first wins. Rows appear in type order,
/// only for types with at least one concept, so no cell divides by zero.
pub fn pass_rate_table(
    concepts: &[GeneratedConcept],
    verdicts: &[RelevancyVerdict],
) -> Result<PassRateTable, RelevancyError> {
    let mut by_key: BTreeMap<(&str, EvaluatorKind), &RelevancyVerdict> = BTreeMap::new();
    for verdict in verdicts {
        by_key
            .entry((verdict.concept_id.as_str(), verdict.evaluator))
            .or_insert(verdict);
    }
    let lookup = |concept_id: &str, evaluator: EvaluatorKind| {
        by_key
            .get(&(concept_id, evaluator))
            .copied()
            .ok_or_else(|| RelevancyError::MissingVerdict {
                concept_id: concept_id.to_string(),
                evaluator,
            })
    };

    let mut rows = Vec::new();
    for concept_type in ConceptType::ALL {
        let of_type: Vec<&GeneratedConcept> = concepts
            .iter()
            .filter(|c| c.spec.concept_type() == concept_type)
            .collect();
        if of_type.is_empty() {
            continue;
        }
        let mut nature_passed = 0usize;
        let mut problem_passed = 0usize;
        let mut overall_passed = 0usize;
        let has_problem_evaluator = concept_type != ConceptType::Type1;
        for concept in &of_type {
            let nature = lookup(&concept.id, EvaluatorKind::NatureSolution)?;
            let mut passes = nature.related;
            if nature.related {
                nature_passed += 1;
            }
            if has_problem_evaluator {
                let evaluator = match concept_type {
                    ConceptType::Type2 => EvaluatorKind::ProblemSolutionBenefits,
                    ConceptType::Type3 => EvaluatorKind::ProblemSolutionChallenge,
                    ConceptType::Type1 => unreachable!(),
                };
                let problem = lookup(&concept.id, evaluator)?;
                if problem.related {
                    problem_passed += 1;
                }
                passes = passes && problem.related;
            }
            if passes {
                overall_passed += 1;
            }
        }
        let total = of_type.len();
        rows.push(PassRateRow {
            concept_type,
            nature_solution: RateCell {
                passed: nature_passed,
                total,
            },
            problem_solution: has_problem_evaluator.then_some(RateCell {
                passed: problem_passed,
                total,
            }),
            overall: RateCell {
                passed: overall_passed,
                total,
            },
        });
    }
    Ok(PassRateTable { rows })
}

/// Fixed-width histogram of verdict probabilities over `[0, 1]`:
/// 20 bins of width 0.05, with 1.0 counted in the last bin.
pub fn probability_histogram(verdicts: &[RelevancyVerdict]) -> [usize; HISTOGRAM_BINS] {
    let mut bins = [0usize; HISTOGRAM_BINS];
    for verdict in verdicts {
        let bin = ((verdict.probability * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1);
        bins[bin] += 1;
    }
    bins
}

/// Writes verdicts as CSV (`concept_id,evaluator,probability,related`),
/// probabilities fixed to six decimals so reruns are byte-identical.
pub fn write_verdicts_csv(
    verdicts: &[RelevancyVerdict],
    path: &Path,
) -> Result<(), RelevancyError> {
    let io_err = |source: std::io::Error| RelevancyError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut writer = std::io::BufWriter::new(file);
    writeln!(writer, "concept_id,evaluator,probability,related").map_err(io_err)?;
    for v in verdicts {
        writeln!(
            writer,
            "{},{},{:.6},{}",
            v.concept_id, v.evaluator, v.probability, v.related
        )
        .map_err(io_err)?;
    }
    writer.flush().map_err(io_err)
}

/// Reads a verdicts CSV written by [`write_verdicts_csv`], checking that
/// each row's `related` flag agrees with its probability.
pub fn read_verdicts_csv(path: &Path) -> Result<Vec<RelevancyVerdict>, RelevancyError> {
    let text = std::fs::read_to_string(path).map_err(|source| RelevancyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let csv_err = |line: usize, message: String| RelevancyError::Csv {
        path: path.display().to_string(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "concept_id,evaluator,probability,related")) => {}
        Some((_, other)) => return Err(csv_err(1, format!("unexpected header {other:?}"))),
        None => return Err(csv_err(1, "empty file".to_string())),
    }
    let mut verdicts = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(csv_err(line_no, format!("expected 4 fields, got {}", fields.len())));
        }
        let evaluator = EvaluatorKind::from_str(fields[1])
            .ok_or_else(|| csv_err(line_no, format!("unknown evaluator {:?}", fields[1])))?;
        let probability: f64 = fields[2]
            .parse()
            .map_err(|e| csv_err(line_no, format!("bad probability: {e}")))?;
        if !(0.0..=1.0).contains(&probability) {
            return Err(csv_err(line_no, format!("probability {probability} out of range")));
        }
        let related: bool = fields[3]
            .parse()
            .map_err(|e| csv_err(line_no, format!("bad related flag: {e}")))?;
        if related != (probability >= crate::backend::CLASSIFICATION_THRESHOLD) {
            return Err(csv_err(
                line_no,
                format!("related flag {related} contradicts probability {probability}"),
            ));
        }
        verdicts.push(RelevancyVerdict {
            concept_id: fields[0].to_string(),
            evaluator,
            probability,
            related,
        });
    }
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::MockBackend;
    use crate::corpus::InnovationRecord;

    fn concept(id: &str, spec: ProblemSpec, biomimicry: &str, innovation: &str) -> GeneratedConcept {
        GeneratedConcept {
            id: id.to_string(),
            spec,
            biomimicry: biomimicry.to_string(),
            innovation: innovation.to_string(),
            raw_completion: format!(" Biomimicry: {biomimicry}\n\nInnovation: {innovation}\n[END]"),
            model: "mock/gen1".to_string(),
            temperature: 0.8,
            created_at: 0,
            source_category: None,
        }
    }

    fn type1() -> ProblemSpec {
        ProblemSpec::Type1 {
            applications: vec!["Flying car".to_string()],
        }
    }

    fn type2() -> ProblemSpec {
        ProblemSpec::Type2 {
            benefits: vec!["Lightweight".to_string()],
            applications: vec!["Flying car".to_string()],
        }
    }

    fn type3() -> ProblemSpec {
        ProblemSpec::Type3 {
            challenge: "Lightweight design is a challenge for flying cars.".to_string(),
        }
    }

    fn backend() -> MockBackend {
        let records = vec![InnovationRecord {
            id: "r0".to_string(),
            benefits: vec!["Lightweight".to_string()],
            applications: vec!["Flying car".to_string()],
            challenge: "Reduce mass.".to_string(),
            innovation: "A hollow lattice strut.".to_string(),
            biomimicry: "Bird bones are hollow.".to_string(),
        }];
        MockBackend::with_standard_models(records, 0)
    }

    fn verdict(id: &str, evaluator: EvaluatorKind, probability: f64) -> RelevancyVerdict {
        RelevancyVerdict {
            concept_id: id.to_string(),
            evaluator,
            probability,
            related: probability >= 0.5,
        }
    }

    #[test]
    fn restated_biomimicry_is_related_with_high_confidence() {
        let text = "Hollow bird bones form a strong lattice under bending loads.";
        let c = concept("c1", type1(), text, text);
        let v = evaluate_nature_solution(&c, &backend(), "mock/eval-bio").unwrap();
        assert_eq!(v.evaluator, EvaluatorKind::NatureSolution);
        assert!(v.related);
        assert!(v.probability > 0.9, "p = {}", v.probability);
    }

    #[test]
    fn disjoint_texts_are_unrelated_near_0_269() {
        let c = concept(
            "c1",
            type1(),
            "Octopus tentacles grip rocks underwater.",
            "Solar panels tilt toward sunlight.",
        );
        let v = evaluate_nature_solution(&c, &backend(), "mock/eval-bio").unwrap();
        let expected = 1.0 / (1.0 + 1f64.exp());
        assert!((v.probability - expected).abs() < 1e-12);
        assert!(!v.related);
    }

    #[test]
    fn a_probability_of_exactly_one_half_counts_as_related() {
        let result = ClassificationResult::from_probability(0.5);
        let v = RelevancyVerdict::from_classification("c", EvaluatorKind::NatureSolution, result);
        assert!(v.related);
    }

    #[test]
    fn type1_concepts_have_no_problem_solution_verdict() {
        let c = concept("c1", type1(), "Bird bones.", "A lattice.");
        let v = evaluate_problem_solution(&c, &backend(), &EvaluatorModels::mock_defaults())
            .unwrap();
        assert!(v.is_none());
    }

    #[test]
    fn type2_prompts_put_benefits_after_the_innovation() {
        let c = concept("c1", type2(), "Bird bones.", "A lattice.");
        let (kind, prompt) = problem_solution_prompt(&c).unwrap();
        assert_eq!(kind, EvaluatorKind::ProblemSolutionBenefits);
        assert_eq!(prompt, "[Inno]A lattice.[Inno][Ben]Lightweight[Ben]\n\n###\n\n");
    }

    #[test]
    fn type3_prompts_start_with_the_challenge() {
        let c = concept("c1", type3(), "Bird bones.", "A lattice.");
        let (kind, prompt) = problem_solution_prompt(&c).unwrap();
        assert_eq!(kind, EvaluatorKind::ProblemSolutionChallenge);
        assert!(prompt.starts_with("[Cha]Lightweight design"));
        assert!(prompt.contains("[Inno]A lattice.[Inno]"));
    }

    #[test]
    fn evaluation_emits_one_or_two_verdicts_per_concept_in_order() {
        let concepts = vec![
            concept("a", type1(), "Bird bones.", "A lattice."),
            concept("b", type2(), "Bird bones.", "A lattice."),
            concept("c", type3(), "Bird bones.", "A lattice."),
        ];
        let verdicts =
            evaluate_concepts(&concepts, &backend(), &EvaluatorModels::mock_defaults()).unwrap();
        assert_eq!(verdicts.len(), 5);
        assert_eq!(verdicts[0].concept_id, "a");
        assert_eq!(verdicts[1].concept_id, "b");
        assert_eq!(verdicts[1].evaluator, EvaluatorKind::NatureSolution);
        assert_eq!(verdicts[2].evaluator, EvaluatorKind::ProblemSolutionBenefits);
        assert_eq!(verdicts[4].evaluator, EvaluatorKind::ProblemSolutionChallenge);

        let again =
            evaluate_concepts(&concepts, &backend(), &EvaluatorModels::mock_defaults()).unwrap();
        assert_eq!(verdicts, again);
    }

    #[test]
    fn forty_of_fifty_related_is_an_eighty_percent_row() {
        let concepts: Vec<GeneratedConcept> = (0..50)
            .map(|i| concept(&format!("c{i:02}"), type1(), "B.", "I."))
            .collect();
        let verdicts: Vec<RelevancyVerdict> = (0..50)
            .map(|i| {
                let p = if i < 40 { 0.9 } else { 0.1 };
                verdict(&format!("c{i:02}"), EvaluatorKind::NatureSolution, p)
            })
            .collect();
        let table = pass_rate_table(&concepts, &verdicts).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = table.row(ConceptType::Type1).unwrap();
        assert_eq!(row.nature_solution.passed, 40);
        assert_eq!(row.nature_solution.total, 50);
        assert!((row.nature_solution.rate() - 0.8).abs() < 1e-12);
        assert!(row.problem_solution.is_none());
        assert_eq!(row.overall.passed, 40);
    }

    #[test]
    fn overall_is_the_conjunction_of_both_evaluators() {
        let concepts = vec![
            concept("a", type2(), "B.", "I."),
            concept("b", type2(), "B.", "I."),
        ];
        let verdicts = vec![
            verdict("a", EvaluatorKind::NatureSolution, 0.9),
            verdict("a", EvaluatorKind::ProblemSolutionBenefits, 0.8),
            verdict("b", EvaluatorKind::NatureSolution, 0.7),
            verdict("b", EvaluatorKind::ProblemSolutionBenefits, 0.2),
        ];
        let table = pass_rate_table(&concepts, &verdicts).unwrap();
        let row = table.row(ConceptType::Type2).unwrap();
        assert_eq!(row.nature_solution.passed, 2);
        assert_eq!(row.problem_solution.unwrap().passed, 1);
        assert_eq!(row.overall.passed, 1);
        assert!((row.overall.rate() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn overall_never_exceeds_either_evaluator_rate() {
        // A small pseudo-random sweep; the conjunction bound must hold
        // whatever the verdict pattern.
        for seed in 0..50u64 {
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state
            };
            let concepts: Vec<GeneratedConcept> = (0..20)
                .map(|i| concept(&format!("c{i:02}"), type3(), "B.", "I."))
                .collect();
            let verdicts: Vec<RelevancyVerdict> = concepts
                .iter()
                .flat_map(|c| {
                    let p1 = (next() % 1000) as f64 / 999.0;
                    let p2 = (next() % 1000) as f64 / 999.0;
                    vec![
                        verdict(&c.id, EvaluatorKind::NatureSolution, p1),
                        verdict(&c.id, EvaluatorKind::ProblemSolutionChallenge, p2),
                    ]
                })
                .collect();
            let table = pass_rate_table(&concepts, &verdicts).unwrap();
            let row = table.row(ConceptType::Type3).unwrap();
            let bound = row
                .nature_solution
                .rate()
                .min(row.problem_solution.unwrap().rate());
            assert!(row.overall.rate() <= bound + 1e-12);
        }
    }

    #[test]
    fn a_type_with_no_concepts_has_no_row() {
        let concepts = vec![concept("a", type1(), "B.", "I.")];
        let verdicts = vec![verdict("a", EvaluatorKind::NatureSolution, 0.6)];
        let table = pass_rate_table(&concepts, &verdicts).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.row(ConceptType::Type2).is_none());
        assert!(table.row(ConceptType::Type3).is_none());
    }

    #[test]
    fn a_missing_verdict_names_the_concept_and_evaluator() {
        let concepts = vec![concept("a", type2(), "B.", "I.")];
        let verdicts = vec![verdict("a", EvaluatorKind::NatureSolution, 0.6)];
        match pass_rate_table(&concepts, &verdicts).unwrap_err() {
            RelevancyError::MissingVerdict {
                concept_id,
                evaluator,
            } => {
                assert_eq!(concept_id, "a");
                assert_eq!(evaluator, EvaluatorKind::ProblemSolutionBenefits);
            }
            other => panic!("expected missing verdict, got {other}"),
        }
    }

    #[test]
    fn threshold_semantics_hold_across_the_unit_interval() {
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            let v = RelevancyVerdict::from_classification(
                "c",
                EvaluatorKind::NatureSolution,
                ClassificationResult::from_probability(p),
            );
            assert_eq!(v.related, p >= 0.5, "p = {p}");
        }
    }

    #[test]
    fn histogram_bins_cover_the_unit_interval() {
        let verdicts = vec![
            verdict("a", EvaluatorKind::NatureSolution, 0.0),
            verdict("b", EvaluatorKind::NatureSolution, 0.049),
            verdict("c", EvaluatorKind::NatureSolution, 0.05),
            verdict("d", EvaluatorKind::NatureSolution, 0.5),
            verdict("e", EvaluatorKind::NatureSolution, 1.0),
        ];
        let bins = probability_histogram(&verdicts);
        assert_eq!(bins[0], 2);
        assert_eq!(bins[1], 1);
        assert_eq!(bins[10], 1);
        assert_eq!(bins[19], 1);
        assert_eq!(bins.iter().sum::<usize>(), verdicts.len());
    }

    #[test]
    fn verdicts_csv_round_trips_and_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("verdicts.csv");
        let verdicts = vec![
            verdict("a", EvaluatorKind::NatureSolution, 0.731058),
            verdict("b", EvaluatorKind::ProblemSolutionChallenge, 0.268941),
        ];
        write_verdicts_csv(&verdicts, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("concept_id,evaluator,probability,related\n"));
        assert!(text.contains("a,nature_solution,0.731058,true\n"));
        let back = read_verdicts_csv(&path).unwrap();
        assert_eq!(back, verdicts);

        write_verdicts_csv(&verdicts, &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    }

    #[test]
    fn inconsistent_csv_rows_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("verdicts.csv");
        std::fs::write(
            &path,
            "concept_id,evaluator,probability,related\na,nature_solution,0.700000,false\n",
        )
        .unwrap();
        match read_verdicts_csv(&path).unwrap_err() {
            RelevancyError::Csv { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("contradicts"));
            }
            other => panic!("expected csv error, got {other}"),
        }
    }

    #[test]
    fn table_renderings_omit_problem_solution_for_type1() {
        let concepts = vec![
            concept("a", type1(), "B.", "I."),
            concept("b", type3(), "B.", "I."),
        ];
        let verdicts = vec![
            verdict("a", EvaluatorKind::NatureSolution, 0.9),
            verdict("b", EvaluatorKind::NatureSolution, 0.9),
            verdict("b", EvaluatorKind::ProblemSolutionChallenge, 0.9),
        ];
        let table = pass_rate_table(&concepts, &verdicts).unwrap();
        let csv = table.to_csv();
        let type1_line = csv.lines().find(|l| l.starts_with("type1")).unwrap();
        assert!(type1_line.contains(",,,"), "{type1_line}");
        let pretty = table.to_string();
        assert!(pretty.lines().any(|l| l.contains('—')), "{pretty}");
    }
}
