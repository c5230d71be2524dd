use std::fmt;

use super::{instance_id, Origin, ParallelInstance};
use crate::emoji::{segment, Span};

/// Why a candidate pair was not kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rejection {
    NoEmoji,
    EmptyText,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NoEmoji => f.write_str("no emoji left after filtering"),
            Rejection::EmptyText => f.write_str("text is empty"),
        }
    }
}

impl std::error::Error for Rejection {}

/// Builds an instance from a raw pair, keeping only the emoji tokens of the
/// emoji side (in order) and rejecting pairs with no emoji or no text.
pub fn filter_instance(
    text: &str,
    raw_emoji: &str,
    topic: &str,
    origin: Origin,
) -> Result<ParallelInstance, Rejection> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Rejection::EmptyText);
    }
    let emoji: Vec<_> = segment(raw_emoji)
        .into_iter()
        .filter_map(|s| match s {
            Span::Emoji(t) => Some(t),
            Span::Text(_) => None,
        })
        .collect();
    if emoji.is_empty() {
        return Err(Rejection::NoEmoji);
    }
    let emoji_str: String = emoji.iter().map(|t| t.as_str()).collect();
    Ok(ParallelInstance {
        id: instance_id(text, &emoji_str),
        text: text.to_string(),
        emoji,
        topic: topic.to_string(),
        origin,
    })
}

/// Result of parsing one raw completion.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOutcome {
    pub instances: Vec<ParallelInstance>,
    /// Label fragments that did not form a Text/Emoji pair.
    pub unparseable: usize,
    /// Pairs dropped by [`filter_instance`].
    pub rejected: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Text,
    Emoji,
}

/// Labels in match priority order; "emoji translation:" must win over "emoji:".
const LABELS: [(&str, Label); 3] =
    [("emoji translation:", Label::Emoji), ("emoji:", Label::Emoji), ("text:", Label::Text)];

fn find_labels(raw: &str) -> Vec<(usize, usize, Label)> {
    // ASCII lowercasing keeps byte offsets aligned with `raw`
    let lower = raw.to_ascii_lowercase();
    let bytes = lower.as_bytes();
    let mut found = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let boundary = i == 0 || !(raw[..i].chars().next_back().is_some_and(char::is_alphanumeric));
        let hit = boundary.then(|| LABELS.iter().find(|(pat, _)| lower[i..].starts_with(pat))).flatten();
        match hit {
            Some((pat, label)) => {
                found.push((i, i + pat.len(), *label));
                i += pat.len();
            }
            None => {
                i += 1;
                while i < bytes.len() && !lower.is_char_boundary(i) {
                    i += 1;
                }
            }
        }
    }
    found
}

/// Extracts every `Text: ... Emoji Translation: ...` (or `Emoji:`) pair from a
/// completion, in document order. Labels are case-insensitive.
pub fn parse_completion(raw: &str, topic: &str, origin: Origin) -> ParseOutcome {
    let labels = find_labels(raw);
    let mut out = ParseOutcome::default();
    let value = |k: usize| {
        let start = labels[k].1;
        let end = labels.get(k + 1).map_or(raw.len(), |l| l.0);
        &raw[start..end]
    };

    let mut k = 0;
    while k < labels.len() {
        match (labels[k].2, labels.get(k + 1).map(|l| l.2)) {
            (Label::Text, Some(Label::Emoji)) => {
                match filter_instance(value(k), value(k + 1), topic, origin) {
                    Ok(inst) => out.instances.push(inst),
                    Err(_) => out.rejected += 1,
                }
                k += 2;
            }
            _ => {
                out.unparseable += 1;
                k += 1;
            }
        }
    }
    out
}
