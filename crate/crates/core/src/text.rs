//! Shared text utilities: tokenization and the default stopword list.
//!
//! Tokenization is intentionally blunt — maximal runs of alphabetic
//! characters, lowercased — because both the embedding vocabulary and the
//! mock classifier's word-overlap measure want plain lowercase word forms.

use std::collections::BTreeSet;
use std::sync::OnceLock;

/// The default English stopword list, shipped as an editable data file and
/// compiled in as the fallback when no stopword file is configured.
pub const DEFAULT_STOPWORDS_FILE: &str = include_str!("../data/stopwords.txt");

/// Splits text into lowercase alphabetic tokens.
///
/// A token is a maximal run of alphabetic characters; digits, punctuation,
/// and whitespace all terminate a token. "Self-cleaning!" becomes
/// `["self", "cleaning"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphabetic() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Parses a stopword file: one word per line, `#` comments and blank lines
/// ignored, entries lowercased.
pub fn parse_stopwords(contents: &str) -> BTreeSet<String> {
    contents
        .lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// The parsed default stopword set.
pub fn default_stopwords() -> &'static BTreeSet<String> {
    static SET: OnceLock<BTreeSet<String>> = OnceLock::new();
    SET.get_or_init(|| parse_stopwords(DEFAULT_STOPWORDS_FILE))
}

/// Lowercase content words of a text: tokens minus stopwords, deduplicated.
pub fn content_word_set(text: &str, stopwords: &BTreeSet<String>) -> BTreeSet<String> {
    tokenize(text)
        .into_iter()
        .filter(|t| !stopwords.contains(t))
        .collect()
}
