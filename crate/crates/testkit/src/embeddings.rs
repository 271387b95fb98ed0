//! Synthetic word vectors and word2vec file writers.
//!
//! Vectors are derived from an FNV-1a hash of the token and component
//! index, so any token has the same vector on every platform and in every
//! run, with no RNG state to thread around. The writers produce both
//! word2vec encodings (text and little-endian binary with f32 components)
//! so reader round-trip tests can compare the two.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use bidforge::corpus::InnovationRecord;
use bidforge::text::tokenize;

/// Dimension used by the synthetic stores unless a test asks otherwise.
pub const DEFAULT_DIM: usize = 16;

/// A deterministic pseudo-random unit-range vector for a token.
///
/// Component `d` is `fnv1a64(token, d)` mapped linearly onto `[-1, 1)`.
/// Distinct tokens get vectors that are far apart with overwhelming
/// probability, which is all the distance tests need.
pub fn synthetic_vector(token: &str, dim: usize) -> Vec<f64> {
    (0..dim as u64)
        .map(|d| {
            let h = fnv1a64(&[token.as_bytes(), &d.to_le_bytes()]);
            (h as f64 / u64::MAX as f64) * 2.0 - 1.0
        })
        .collect()
}

/// All distinct lowercase alphabetic tokens across the given texts, sorted.
pub fn vocabulary_of<'a>(texts: impl IntoIterator<Item = &'a str>) -> Vec<String> {
    let set: BTreeSet<String> = texts.into_iter().flat_map(tokenize).collect();
    set.into_iter().collect()
}

/// Vocabulary entries covering every text field of every record, each token
/// paired with its synthetic vector.
pub fn entries_for_corpus(records: &[InnovationRecord], dim: usize) -> Vec<(String, Vec<f64>)> {
    let mut texts: Vec<&str> = Vec::new();
    for r in records {
        texts.push(&r.challenge);
        texts.push(&r.innovation);
        texts.push(&r.biomimicry);
        texts.extend(r.benefits.iter().map(String::as_str));
        texts.extend(r.applications.iter().map(String::as_str));
    }
    vocabulary_of(texts)
        .into_iter()
        .map(|token| {
            let vector = synthetic_vector(&token, dim);
            (token, vector)
        })
        .collect()
}

/// A small fixed token set ("w00", "w01", …) with synthetic vectors, for
/// tests that want vocabulary independent of any corpus.
pub fn synthetic_entries(count: usize, dim: usize) -> Vec<(String, Vec<f64>)> {
    (0..count)
        .map(|i| {
            let token = format!("w{i:02}");
            let vector = synthetic_vector(&token, dim);
            (token, vector)
        })
        .collect()
}

/// Writes entries in word2vec text format: a "count dim" header line, then
/// one "token v1 … vd" line per entry, six decimals per component.
pub fn write_word2vec_text(path: &Path, entries: &[(String, Vec<f64>)], dim: usize) {
    let mut out = String::new();
    out.push_str(&format!("{} {}\n", entries.len(), dim));
    for (token, vector) in entries {
        assert_eq!(vector.len(), dim, "entry {token} has the wrong dimension");
        out.push_str(token);
        for v in vector {
            out.push_str(&format!(" {v:.6}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out).expect("write word2vec text file");
}

/// Writes entries in word2vec binary format: the same ASCII header, then
/// per entry the token, a single space, and `dim` little-endian f32s.
pub fn write_word2vec_binary(path: &Path, entries: &[(String, Vec<f64>)], dim: usize) {
    let file = std::fs::File::create(path).expect("create word2vec binary file");
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "{} {}", entries.len(), dim).unwrap();
    for (token, vector) in entries {
        assert_eq!(vector.len(), dim, "entry {token} has the wrong dimension");
        w.write_all(token.as_bytes()).unwrap();
        w.write_all(b" ").unwrap();
        for v in vector {
            w.write_all(&(*v as f32).to_le_bytes()).unwrap();
        }
    }
    w.flush().unwrap();
}

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
