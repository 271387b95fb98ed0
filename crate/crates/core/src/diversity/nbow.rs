//! Normalized bag-of-words (nBOW) document vectors.
//!
//! A document is reduced to its unique in-vocabulary content tokens, each
//! carrying a weight proportional to its occurrence count. Weights are
//! strictly positive and sum to one, so a document is a probability
//! distribution over tokens — exactly the marginal a transport solver needs.

use std::collections::{BTreeMap, BTreeSet};

use crate::text::tokenize;

use super::embeddings::EmbeddingStore;
use super::DiversityError;

/// Upper bound on unique tokens per document. The transport solver cost is
/// quadratic in document size; this cap keeps a single pairwise distance
/// comfortably under a millisecond-to-seconds budget and flags misuse (for
/// example, feeding a whole corpus in as one "document").
pub const MAX_DOCUMENT_TOKENS: usize = 500;

/// A document as a normalized distribution over unique tokens.
///
/// Tokens are stored in ascending order, so two documents with the same
/// multiset of tokens compare equal regardless of original word order.
#[derive(Debug, Clone, PartialEq)]
pub struct NBowDocument {
    tokens: Vec<String>,
    weights: Vec<f64>,
}

impl NBowDocument {
    /// Builds a document from parallel token/weight lists, enforcing the
    /// invariants: non-empty, unique sorted tokens, strictly positive weights
    /// summing to one within 1e-9.
    pub fn from_parts(tokens: Vec<String>, weights: Vec<f64>) -> Result<Self, DiversityError> {
        if tokens.is_empty() {
            return Err(DiversityError::DocumentEmpty);
        }
        if tokens.len() != weights.len() {
            return Err(DiversityError::Format {
                offset: 0,
                message: format!(
                    "{} tokens but {} weights",
                    tokens.len(),
                    weights.len()
                ),
            });
        }
        if tokens.len() > MAX_DOCUMENT_TOKENS {
            return Err(DiversityError::DocumentTooLarge {
                unique: tokens.len(),
                limit: MAX_DOCUMENT_TOKENS,
            });
        }
        for pair in tokens.windows(2) {
            if pair[0] >= pair[1] {
                return Err(DiversityError::Format {
                    offset: 0,
                    message: format!(
                        "tokens must be unique and sorted; saw {:?} before {:?}",
                        pair[0], pair[1]
                    ),
                });
            }
        }
        let mut sum = 0.0;
        for (token, &w) in tokens.iter().zip(&weights) {
            if !w.is_finite() || w <= 0.0 {
                return Err(DiversityError::Format {
                    offset: 0,
                    message: format!("weight for {token:?} must be strictly positive, got {w}"),
                });
            }
            sum += w;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DiversityError::Format {
                offset: 0,
                message: format!("weights must sum to 1, got {sum}"),
            });
        }
        Ok(Self { tokens, weights })
    }

    /// Unique tokens in ascending order.
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Weights parallel to [`NBowDocument::tokens`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of unique tokens.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    /// Always false: the constructors reject empty documents.
    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Converts free text to an nBOW document over `store`'s vocabulary.
///
/// Tokenization lowercases and keeps alphabetic runs only; `stopwords` and
/// tokens missing from `store` are dropped. Counts of the surviving tokens
/// are normalized to weights. Pass
/// [`crate::text::default_stopwords`] for the shipped English list, or an
/// empty set to keep every in-vocabulary token.
///
/// Errors with [`DiversityError::DocumentEmpty`] when nothing survives
/// preprocessing, and [`DiversityError::DocumentTooLarge`] past
/// [`MAX_DOCUMENT_TOKENS`] unique tokens.
pub fn to_nbow(
    text: &str,
    store: &EmbeddingStore,
    stopwords: &BTreeSet<String>,
) -> Result<NBowDocument, DiversityError> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for token in tokenize(text) {
        if stopwords.contains(&token) || !store.contains(&token) {
            continue;
        }
        *counts.entry(token).or_insert(0) += 1;
    }
    if counts.is_empty() {
        return Err(DiversityError::DocumentEmpty);
    }
    if counts.len() > MAX_DOCUMENT_TOKENS {
        return Err(DiversityError::DocumentTooLarge {
            unique: counts.len(),
            limit: MAX_DOCUMENT_TOKENS,
        });
    }
    let total: usize = counts.values().sum();
    let (tokens, weights) = counts
        .into_iter()
        .map(|(token, count)| (token, count as f64 / total as f64))
        .unzip();
    Ok(NBowDocument { tokens, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::default_stopwords;

    fn store_over(tokens: &[&str]) -> EmbeddingStore {
        EmbeddingStore::from_entries(
            tokens
                .iter()
                .enumerate()
                .map(|(i, t)| ((*t).to_owned(), vec![i as f64, 1.0])),
        )
        .expect("valid store")
    }

    #[test]
    fn counts_normalize_to_weights() {
        let store = store_over(&["wing", "drag", "beak"]);
        let doc = to_nbow("Wing drag: wing, wing — drag!", &store, default_stopwords()).unwrap();
        assert_eq!(doc.tokens(), ["drag", "wing"]);
        assert_eq!(doc.weights(), [2.0 / 5.0, 3.0 / 5.0]);
        let sum: f64 = doc.weights().iter().sum();
        assert!((sum - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn stopwords_and_oov_tokens_are_dropped() {
        let store = store_over(&["kingfisher", "beak", "the"]);
        let doc = to_nbow(
            "the kingfisher and its beak of the osprey",
            &store,
            default_stopwords(),
        )
        .unwrap();
        // "the", "and", "its", "of" are stopwords (even though "the" is in
        // the store); "osprey" is out of vocabulary.
        assert_eq!(doc.tokens(), ["beak", "kingfisher"]);
        assert_eq!(doc.weights(), [0.5, 0.5]);
    }

    #[test]
    fn empty_stopword_set_keeps_everything_in_vocabulary() {
        let store = store_over(&["kingfisher", "the"]);
        let doc = to_nbow("the kingfisher", &store, &BTreeSet::new()).unwrap();
        assert_eq!(doc.tokens(), ["kingfisher", "the"]);
    }

    #[test]
    fn word_order_does_not_matter() {
        let store = store_over(&["alpha", "beta", "gamma"]);
        let a = to_nbow("alpha beta gamma beta", &store, default_stopwords()).unwrap();
        let b = to_nbow("beta gamma BETA alpha", &store, default_stopwords()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_after_preprocessing_is_an_error() {
        let store = store_over(&["wing"]);
        for text in ["", "the of and", "osprey talon", "12345 !!"] {
            let err = to_nbow(text, &store, default_stopwords()).unwrap_err();
            assert!(matches!(err, DiversityError::DocumentEmpty), "text {text:?}");
        }
    }

    /// Token `i` as three lowercase letters (base-26), so the alphabetic
    /// tokenizer keeps each one intact and distinct.
    fn letter_token(i: usize) -> String {
        let a = b'a';
        String::from_utf8(vec![
            a + (i / 676 % 26) as u8,
            a + (i / 26 % 26) as u8,
            a + (i % 26) as u8,
        ])
        .unwrap()
    }

    #[test]
    fn documents_over_the_token_cap_are_rejected() {
        let tokens: Vec<String> = (0..MAX_DOCUMENT_TOKENS + 1).map(letter_token).collect();
        let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
        let store = store_over(&refs);
        let text = tokens.join(" ");
        // Empty stopword set: some synthetic three-letter tokens ("and",
        // "all", …) would otherwise be filtered and dodge the cap.
        let none = BTreeSet::new();
        let err = to_nbow(&text, &store, &none).unwrap_err();
        match err {
            DiversityError::DocumentTooLarge { unique, limit } => {
                assert_eq!(unique, MAX_DOCUMENT_TOKENS + 1);
                assert_eq!(limit, MAX_DOCUMENT_TOKENS);
            }
            other => panic!("unexpected error: {other}"),
        }
        // Exactly at the cap is fine.
        let at_cap = tokens[..MAX_DOCUMENT_TOKENS].join(" ");
        assert_eq!(
            to_nbow(&at_cap, &store, &none).unwrap().len(),
            MAX_DOCUMENT_TOKENS
        );
    }

    #[test]
    fn from_parts_enforces_invariants() {
        let ok = NBowDocument::from_parts(
            vec!["a".into(), "b".into()],
            vec![0.25, 0.75],
        )
        .unwrap();
        assert_eq!(ok.len(), 2);
        assert!(!ok.is_empty());

        assert!(matches!(
            NBowDocument::from_parts(vec![], vec![]),
            Err(DiversityError::DocumentEmpty)
        ));
        // Unsorted tokens.
        assert!(NBowDocument::from_parts(
            vec!["b".into(), "a".into()],
            vec![0.5, 0.5]
        )
        .is_err());
        // Duplicate tokens.
        assert!(NBowDocument::from_parts(
            vec!["a".into(), "a".into()],
            vec![0.5, 0.5]
        )
        .is_err());
        // Zero weight.
        assert!(NBowDocument::from_parts(
            vec!["a".into(), "b".into()],
            vec![0.0, 1.0]
        )
        .is_err());
        // Sum off by more than 1e-9.
        assert!(NBowDocument::from_parts(
            vec!["a".into(), "b".into()],
            vec![0.5, 0.6]
        )
        .is_err());
        // Length mismatch.
        assert!(NBowDocument::from_parts(vec!["a".into()], vec![0.5, 0.5]).is_err());
    }
}
