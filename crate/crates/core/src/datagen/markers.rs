//! Marker tokens that delimit text segments inside evaluator prompts.
//!
//! A segment is wrapped as `[Tag]text[Tag]` with the same literal on both
//! sides. Texts that already contain a marker literal are rejected rather
//! than escaped: an escape scheme would leak into the fine-tuned models'
//! token distribution, and corpus text never legitimately contains these
//! bracketed tags.

use std::fmt;

use super::DatagenError;

/// The four segment markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MarkerTag {
    /// Biological mechanism text.
    Bio,
    /// Innovation text.
    Inno,
    /// Benefits keyword list.
    Ben,
    /// Challenge text.
    Cha,
}

impl MarkerTag {
    pub const ALL: [MarkerTag; 4] = [
        MarkerTag::Bio,
        MarkerTag::Inno,
        MarkerTag::Ben,
        MarkerTag::Cha,
    ];

    /// The literal token, brackets included.
    pub fn literal(self) -> &'static str {
        match self {
            MarkerTag::Bio => "[Bio]",
            MarkerTag::Inno => "[Inno]",
            MarkerTag::Ben => "[Ben]",
            MarkerTag::Cha => "[Cha]",
        }
    }

    /// Wraps without the emptiness or collision checks. For template code
    /// that has already validated its inputs.
    pub(crate) fn wrap_unchecked(self, text: &str) -> String {
        format!("{}{}{}", self.literal(), text, self.literal())
    }
}

impl fmt::Display for MarkerTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.literal())
    }
}

/// Returns the first marker literal occurring in `text`, if any.
pub fn find_marker(text: &str) -> Option<MarkerTag> {
    MarkerTag::ALL
        .iter()
        .filter_map(|tag| text.find(tag.literal()).map(|pos| (pos, *tag)))
        .min_by_key(|(pos, _)| *pos)
        .map(|(_, tag)| tag)
}

/// Wraps `text` in the marker pair for `tag`.
///
/// Empty (or whitespace-only) text is refused: an empty segment would make
/// the two adjacent literals ambiguous to split.
pub fn wrap_markers(text: &str, tag: MarkerTag) -> Result<String, DatagenError> {
    if text.trim().is_empty() {
        return Err(DatagenError::EmptyText);
    }
    Ok(tag.wrap_unchecked(text))
}

/// Inverse of [`wrap_markers`]: strips one marker pair and returns the inner
/// text. The input must be exactly `[Tag]text[Tag]`.
pub fn parse_markers(wrapped: &str, tag: MarkerTag) -> Result<&str, DatagenError> {
    let lit = tag.literal();
    let inner = wrapped
        .strip_prefix(lit)
        .and_then(|rest| rest.strip_suffix(lit))
        .ok_or_else(|| DatagenError::MalformedMarkers {
            tag,
            found: preview(wrapped),
        })?;
    // "[Bio][Bio]" would strip to "" and also hide an interior literal.
    if inner.is_empty() || inner.contains(lit) {
        return Err(DatagenError::MalformedMarkers {
            tag,
            found: preview(wrapped),
        });
    }
    Ok(inner)
}

/// Scans a prompt for marker-wrapped segments, in order of appearance.
///
/// Each segment runs from one marker literal to its next repetition; text
/// outside marker pairs (like the trailing prompt separator) is ignored.
/// Used by the mock classifier to recover the two segments it compares.
pub fn extract_segments(prompt: &str) -> Vec<(MarkerTag, &str)> {
    let mut segments = Vec::new();
    let mut offset = 0;
    while let Some((pos, tag)) = next_marker(&prompt[offset..]) {
        let lit = tag.literal();
        let open_end = offset + pos + lit.len();
        match prompt[open_end..].find(lit) {
            Some(close) => {
                segments.push((tag, &prompt[open_end..open_end + close]));
                offset = open_end + close + lit.len();
            }
            None => break,
        }
    }
    segments
}

fn next_marker(text: &str) -> Option<(usize, MarkerTag)> {
    MarkerTag::ALL
        .iter()
        .filter_map(|tag| text.find(tag.literal()).map(|pos| (pos, *tag)))
        .min_by_key(|(pos, _)| *pos)
}

fn preview(s: &str) -> String {
    const MAX: usize = 40;
    if s.chars().count() <= MAX {
        s.to_string()
    } else {
        let cut: String = s.chars().take(MAX).collect();
        format!("{cut}…")
    }
}
