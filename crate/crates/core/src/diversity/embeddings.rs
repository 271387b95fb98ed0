//! Word-embedding storage and word2vec-format readers.
//!
//! Two on-disk encodings are supported, both carrying the same ASCII header
//! line `"<count> <dimension>\n"`:
//!
//! * **Text**: one line per entry, `token c1 c2 … cd`, components in decimal
//!   notation.
//! * **Binary**: per entry, the UTF-8 token bytes, a single `0x20` space, then
//!   `dimension` little-endian `f32` values. Optional whitespace (space or
//!   newline) before a token is tolerated, as some exporters emit it.
//!
//! Binary components are widened from `f32` to `f64` on load, so a vector
//! round-tripped through both encodings agrees within single-precision
//! accuracy (~1e-6 componentwise), not bit-for-bit.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::DiversityError;

/// On-disk encoding of an embedding file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    /// `count dim` header, then one whitespace-separated line per token.
    Word2VecText,
    /// `count dim` header, then token + space + `dim` little-endian f32s.
    Word2VecBinary,
}

/// An in-memory map from token to embedding vector, all of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dimension: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    /// Builds a store from `(token, vector)` pairs.
    ///
    /// Fails with [`DiversityError::DimensionMismatch`] if the vectors do not
    /// all share one dimension, and [`DiversityError::DuplicateToken`] if a
    /// token appears twice. An empty entry list or a zero-length vector is
    /// rejected as a format error: a store must be able to answer
    /// [`EmbeddingStore::dimension`].
    pub fn from_entries(
        entries: impl IntoIterator<Item = (String, Vec<f64>)>,
    ) -> Result<Self, DiversityError> {
        let mut dimension: Option<usize> = None;
        let mut vectors = BTreeMap::new();
        for (token, vector) in entries {
            let dim = *dimension.get_or_insert(vector.len());
            if vector.len() != dim {
                return Err(DiversityError::DimensionMismatch {
                    expected: dim,
                    found: vector.len(),
                });
            }
            if token.is_empty() {
                return Err(DiversityError::Format {
                    offset: 0,
                    message: "empty token".into(),
                });
            }
            if vectors.insert(token.clone(), vector).is_some() {
                return Err(DiversityError::DuplicateToken { token });
            }
        }
        match dimension {
            Some(0) | None => Err(DiversityError::Format {
                offset: 0,
                message: "store needs at least one entry of nonzero dimension".into(),
            }),
            Some(dimension) => Ok(Self { dimension, vectors }),
        }
    }

    /// Reads an embedding file in the given format.
    pub fn load(path: &Path, format: EmbeddingFormat) -> Result<Self, DiversityError> {
        let bytes = fs::read(path).map_err(|source| DiversityError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        match format {
            EmbeddingFormat::Word2VecText => Self::parse_text(&bytes),
            EmbeddingFormat::Word2VecBinary => Self::parse_binary(&bytes),
        }
    }

    /// Number of components per vector.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Number of tokens in the store.
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// True when the store holds no tokens (unreachable via the constructors,
    /// which reject empty input, but kept for API completeness).
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Whether the store has a vector for `token`.
    pub fn contains(&self, token: &str) -> bool {
        self.vectors.contains_key(token)
    }

    /// The vector for `token`, if present.
    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.vectors.get(token).map(Vec::as_slice)
    }

    /// All `(token, vector)` entries in ascending token order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(t, v)| (t.as_str(), v.as_slice()))
    }

    fn parse_text(bytes: &[u8]) -> Result<Self, DiversityError> {
        let text = std::str::from_utf8(bytes).map_err(|e| DiversityError::Format {
            offset: e.valid_up_to() as u64,
            message: "file is not valid UTF-8".into(),
        })?;
        let mut offset = 0u64;
        let mut lines = text.split_inclusive('\n');

        let header_line = lines.next().ok_or(DiversityError::Format {
            offset: 0,
            message: "missing header line".into(),
        })?;
        let (count, dimension) = parse_header(header_line.trim_end_matches('\n'), 0)?;
        offset += header_line.len() as u64;

        let mut entries = Vec::with_capacity(count);
        for line in lines {
            let line_offset = offset;
            offset += line.len() as u64;
            let content = line.trim_end_matches(['\n', '\r']);
            if content.is_empty() {
                continue;
            }
            let mut fields = content.split_ascii_whitespace();
            let token = fields.next().expect("non-empty line has a first field");
            let components = fields
                .map(|f| {
                    f.parse::<f64>().map_err(|_| DiversityError::Format {
                        offset: line_offset,
                        message: format!("unparseable component {f:?} for token {token:?}"),
                    })
                })
                .collect::<Result<Vec<f64>, _>>()?;
            if components.len() != dimension {
                return Err(DiversityError::DimensionMismatch {
                    expected: dimension,
                    found: components.len(),
                });
            }
            if entries.len() == count {
                return Err(DiversityError::Format {
                    offset: line_offset,
                    message: format!("more than the {count} entries declared in the header"),
                });
            }
            entries.push((token.to_owned(), components));
        }
        if entries.len() != count {
            return Err(DiversityError::Format {
                offset,
                message: format!("header declared {count} entries, file has {}", entries.len()),
            });
        }
        Self::from_entries(entries)
    }

    fn parse_binary(bytes: &[u8]) -> Result<Self, DiversityError> {
        let header_end = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or(DiversityError::Format {
                offset: 0,
                message: "missing header line".into(),
            })?;
        let header = std::str::from_utf8(&bytes[..header_end]).map_err(|_| {
            DiversityError::Format {
                offset: 0,
                message: "header is not valid UTF-8".into(),
            }
        })?;
        let (count, dimension) = parse_header(header, 0)?;

        let mut pos = header_end + 1;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            // Some exporters pad entries with a newline or extra space.
            while pos < bytes.len() && (bytes[pos] == b'\n' || bytes[pos] == b' ') {
                pos += 1;
            }
            let token_start = pos;
            while pos < bytes.len() && bytes[pos] != b' ' {
                pos += 1;
            }
            if pos == bytes.len() {
                return Err(DiversityError::Format {
                    offset: token_start as u64,
                    message: "unterminated token (expected a space before the vector)".into(),
                });
            }
            let token = std::str::from_utf8(&bytes[token_start..pos])
                .map_err(|_| DiversityError::Format {
                    offset: token_start as u64,
                    message: "token is not valid UTF-8".into(),
                })?
                .to_owned();
            if token.is_empty() {
                return Err(DiversityError::Format {
                    offset: token_start as u64,
                    message: "empty token".into(),
                });
            }
            pos += 1; // the separating space
            let vector_end = pos + 4 * dimension;
            if vector_end > bytes.len() {
                return Err(DiversityError::Format {
                    offset: pos as u64,
                    message: format!("truncated vector for token {token:?}"),
                });
            }
            let components = bytes[pos..vector_end]
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                .collect::<Vec<f64>>();
            pos = vector_end;
            entries.push((token, components));
        }
        while pos < bytes.len() && (bytes[pos] == b'\n' || bytes[pos] == b' ') {
            pos += 1;
        }
        if pos != bytes.len() {
            return Err(DiversityError::Format {
                offset: pos as u64,
                message: "trailing bytes after the declared entries".into(),
            });
        }
        Self::from_entries(entries)
    }
}

/// Parses a `"<count> <dimension>"` header.
fn parse_header(header: &str, offset: u64) -> Result<(usize, usize), DiversityError> {
    let mut fields = header.split_ascii_whitespace();
    let parse = |field: Option<&str>, what: &str| -> Result<usize, DiversityError> {
        field
            .and_then(|f| f.parse::<usize>().ok())
            .ok_or_else(|| DiversityError::Format {
                offset,
                message: format!("header must be `<count> <dimension>`, bad {what}: {header:?}"),
            })
    };
    let count = parse(fields.next(), "count")?;
    let dimension = parse(fields.next(), "dimension")?;
    if fields.next().is_some() {
        return Err(DiversityError::Format {
            offset,
            message: format!("header has trailing fields: {header:?}"),
        });
    }
    if count == 0 || dimension == 0 {
        return Err(DiversityError::Format {
            offset,
            message: format!("count and dimension must be positive: {header:?}"),
        });
    }
    Ok((count, dimension))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store_of(entries: &[(&str, &[f64])]) -> EmbeddingStore {
        EmbeddingStore::from_entries(
            entries
                .iter()
                .map(|(t, v)| ((*t).to_owned(), v.to_vec())),
        )
        .expect("valid entries")
    }

    #[test]
    fn from_entries_builds_a_sorted_store() {
        let store = store_of(&[("zebra", &[1.0, 2.0]), ("ant", &[3.0, 4.0])]);
        assert_eq!(store.dimension(), 2);
        assert_eq!(store.len(), 2);
        let tokens: Vec<&str> = store.entries().map(|(t, _)| t).collect();
        assert_eq!(tokens, ["ant", "zebra"]);
        assert_eq!(store.get("ant"), Some(&[3.0, 4.0][..]));
        assert!(store.get("bee").is_none());
        assert!(store.contains("zebra"));
    }

    #[test]
    fn from_entries_rejects_mixed_dimensions() {
        let err = EmbeddingStore::from_entries(vec![
            ("a".to_owned(), vec![1.0, 2.0]),
            ("b".to_owned(), vec![1.0]),
        ])
        .unwrap_err();
        assert!(matches!(
            err,
            DiversityError::DimensionMismatch {
                expected: 2,
                found: 1
            }
        ));
    }

    #[test]
    fn from_entries_rejects_duplicate_tokens() {
        let err = EmbeddingStore::from_entries(vec![
            ("a".to_owned(), vec![1.0]),
            ("a".to_owned(), vec![2.0]),
        ])
        .unwrap_err();
        assert!(matches!(err, DiversityError::DuplicateToken { token } if token == "a"));
    }

    #[test]
    fn text_round_trip_preserves_components_exactly_at_printed_precision() {
        let dir = std::env::temp_dir().join(format!("emb-text-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("vectors.txt");
        std::fs::write(&path, "2 3\nalpha 1.5 -2.25 0.125\nbeta 0 1 -1\n").unwrap();
        let store = EmbeddingStore::load(&path, EmbeddingFormat::Word2VecText).unwrap();
        assert_eq!(store.dimension(), 3);
        assert_eq!(store.get("alpha"), Some(&[1.5, -2.25, 0.125][..]));
        assert_eq!(store.get("beta"), Some(&[0.0, 1.0, -1.0][..]));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn text_entry_count_must_match_header() {
        let dir = std::env::temp_dir().join(format!("emb-count-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("vectors.txt");
        std::fs::write(&path, "3 2\na 1 2\nb 3 4\n").unwrap();
        let err = EmbeddingStore::load(&path, EmbeddingFormat::Word2VecText).unwrap_err();
        assert!(
            matches!(&err, DiversityError::Format { message, .. } if message.contains("declared 3")),
            "unexpected error: {err}"
        );
        std::fs::write(&path, "1 2\na 1 2\nb 3 4\n").unwrap();
        let err = EmbeddingStore::load(&path, EmbeddingFormat::Word2VecText).unwrap_err();
        assert!(matches!(&err, DiversityError::Format { message, .. } if message.contains("more than")));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn text_reports_byte_offset_of_a_bad_line() {
        let dir = std::env::temp_dir().join(format!("emb-offset-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("vectors.txt");
        // Header "2 2\n" is 4 bytes; first entry line "a 1 2\n" is 6 bytes.
        std::fs::write(&path, "2 2\na 1 2\nb 3 oops\n").unwrap();
        let err = EmbeddingStore::load(&path, EmbeddingFormat::Word2VecText).unwrap_err();
        match err {
            DiversityError::Format { offset, message } => {
                assert_eq!(offset, 10);
                assert!(message.contains("oops"));
            }
            other => panic!("unexpected error: {other}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn binary_round_trip_recovers_f32_exactly() {
        let dir = std::env::temp_dir().join(format!("emb-bin-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("vectors.bin");
        let mut bytes = b"2 2\n".to_vec();
        bytes.extend_from_slice(b"ant ");
        bytes.extend_from_slice(&0.5f32.to_le_bytes());
        bytes.extend_from_slice(&(-1.25f32).to_le_bytes());
        bytes.extend_from_slice(b"bee ");
        bytes.extend_from_slice(&3.0f32.to_le_bytes());
        bytes.extend_from_slice(&0.0f32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        let store = EmbeddingStore::load(&path, EmbeddingFormat::Word2VecBinary).unwrap();
        assert_eq!(store.dimension(), 2);
        assert_eq!(store.get("ant"), Some(&[0.5, -1.25][..]));
        assert_eq!(store.get("bee"), Some(&[3.0, 0.0][..]));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn binary_detects_truncation_with_offset() {
        let dir = std::env::temp_dir().join(format!("emb-trunc-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("vectors.bin");
        let mut bytes = b"1 2\n".to_vec();
        bytes.extend_from_slice(b"ant ");
        bytes.extend_from_slice(&0.5f32.to_le_bytes()); // one component missing
        std::fs::write(&path, &bytes).unwrap();
        let err = EmbeddingStore::load(&path, EmbeddingFormat::Word2VecBinary).unwrap_err();
        match err {
            DiversityError::Format { offset, message } => {
                assert_eq!(offset, 8); // header (4) + "ant " (4)
                assert!(message.contains("truncated"));
            }
            other => panic!("unexpected error: {other}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn header_validation_rejects_garbage() {
        for bad in ["", "5", "a b", "5 0", "0 5", "1 2 3"] {
            assert!(parse_header(bad, 0).is_err(), "accepted header {bad:?}");
        }
        assert_eq!(parse_header("12 300", 0).unwrap(), (12, 300));
    }
}
