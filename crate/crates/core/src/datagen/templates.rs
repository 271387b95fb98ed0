//! Prompt and completion templates for every fine-tuning dataset.
//!
//! These strings are external contract, not style: fine-tuned models only
//! reproduce what they were trained on, so the byte layout here (separator,
//! leading completion space, end marker, header spelling) must stay fixed.
//! Tests pin each template literally.

use crate::corpus::InnovationRecord;

use super::markers::MarkerTag;

/// Terminates every prompt. Completions never contain it.
pub const PROMPT_SEPARATOR: &str = "\n\n###\n\n";

/// Terminates every completion; doubles as the inference stop sequence.
pub const COMPLETION_END: &str = "\n[END]";

/// Joins a keyword list for embedding into a prompt.
pub fn join_keywords(keywords: &[String]) -> String {
    keywords.join(", ")
}

/// Type-1 generator prompt: applications only. Also the prompt shape used by
/// the random-innovation generator.
pub fn gen1_prompt(applications: &[String]) -> String {
    format!("Application: {}{}", join_keywords(applications), PROMPT_SEPARATOR)
}

/// Type-2 generator prompt: benefits line, then applications line.
pub fn gen2_prompt(benefits: &[String], applications: &[String]) -> String {
    format!(
        "Benefits: {}\nApplication: {}{}",
        join_keywords(benefits),
        join_keywords(applications),
        PROMPT_SEPARATOR
    )
}

/// Type-3 generator prompt: the full challenge statement.
pub fn gen3_prompt(challenge: &str) -> String {
    format!("Challenge: {challenge}{PROMPT_SEPARATOR}")
}

/// Completion for all three concept generators: the biological mechanism,
/// then the innovation that applies it.
pub fn generator_completion(biomimicry: &str, innovation: &str) -> String {
    format!(" Biomimicry: {biomimicry}\n\nInnovation: {innovation}{COMPLETION_END}")
}

/// Completion for the random-innovation generator: innovation only.
pub fn random_innovation_completion(innovation: &str) -> String {
    format!(" Innovation: {innovation}{COMPLETION_END}")
}

/// Nature-solution evaluator prompt: biomimicry segment, then innovation
/// segment, each wrapped in its marker pair.
pub fn eval_bio_prompt(biomimicry: &str, innovation: &str) -> String {
    format!(
        "{}{}{}",
        MarkerTag::Bio.wrap_unchecked(biomimicry),
        MarkerTag::Inno.wrap_unchecked(innovation),
        PROMPT_SEPARATOR
    )
}

/// Benefits-side problem-solution evaluator prompt: innovation first, then
/// benefits. The segment order is part of the contract.
pub fn eval_ben_prompt(innovation: &str, benefits: &[String]) -> String {
    format!(
        "{}{}{}",
        MarkerTag::Inno.wrap_unchecked(innovation),
        MarkerTag::Ben.wrap_unchecked(&join_keywords(benefits)),
        PROMPT_SEPARATOR
    )
}

/// Challenge-side problem-solution evaluator prompt: challenge first, then
/// innovation.
pub fn eval_cha_prompt(challenge: &str, innovation: &str) -> String {
    format!(
        "{}{}{}",
        MarkerTag::Cha.wrap_unchecked(challenge),
        MarkerTag::Inno.wrap_unchecked(innovation),
        PROMPT_SEPARATOR
    )
}

/// Completion for a positive evaluator example.
pub fn related_completion() -> String {
    format!(" related{COMPLETION_END}")
}

/// Completion for a negative evaluator example.
pub fn unrelated_completion() -> String {
    format!(" unrelated{COMPLETION_END}")
}

/// Renders the generator completion for a corpus record.
pub fn render_completion(record: &InnovationRecord) -> String {
    generator_completion(&record.biomimicry, &record.innovation)
}
