//! Emoji identification, segmentation, and ZWJ decomposition.
//!
//! An emoji token is one logical emoji as a user would see it: a single
//! pictograph with its presentation selector and skin-tone modifier, a
//! regional-indicator flag pair, a keycap, or any number of those joined by
//! U+200D ZERO WIDTH JOINER. Segmentation is lossless: concatenating the
//! spans returned by [`segment`] reproduces the input exactly.

mod vocab;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use vocab::EmojiVocabulary;

include!(concat!(env!("OUT_DIR"), "/emoji_tables.rs"));

/// U+200D ZERO WIDTH JOINER.
pub const ZWJ: char = '\u{200D}';
/// U+200D as a string, the separator token used by decomposed sequences.
pub const ZWJ_STR: &str = "\u{200D}";
/// U+FE0F VARIATION SELECTOR-16 (emoji presentation).
pub const VS16: char = '\u{FE0F}';
/// U+20E3 COMBINING ENCLOSING KEYCAP.
pub const KEYCAP: char = '\u{20E3}';

const TAG_SPEC: std::ops::RangeInclusive<u32> = 0xE0020..=0xE007E;
const TAG_CANCEL: char = '\u{E007F}';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmojiError {
    #[error("cannot recompose an empty list of parts")]
    EmptyParts,
    #[error("{0:?} is not exactly one emoji token")]
    NotSingleEmoji(String),
}

/// Structural shape of an emoji token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmojiKind {
    Base,
    ZwjComposed,
    FlagSequence,
    Keycap,
    ModifiedBase,
}

/// One logical emoji: an exact codepoint sequence plus its structural kind.
///
/// Ordering and equality use the codepoint sequence, so sorting tokens sorts
/// them by codepoint order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmojiToken {
    text: String,
    kind: EmojiKind,
}

impl EmojiToken {
    /// Parses `s` as exactly one emoji token.
    pub fn parse(s: &str) -> Result<Self, EmojiError> {
        let chars: Vec<char> = s.chars().collect();
        match token_end(&chars, 0) {
            Some(end) if end == chars.len() => Ok(Self::from_valid(s.to_string())),
            _ => Err(EmojiError::NotSingleEmoji(s.to_string())),
        }
    }

    fn from_valid(text: String) -> Self {
        let kind = classify(&text);
        Self { text, kind }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn kind(&self) -> EmojiKind {
        self.kind
    }

    pub fn codepoints(&self) -> impl Iterator<Item = char> + '_ {
        self.text.chars()
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

impl fmt::Display for EmojiToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl fmt::Debug for EmojiToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cps: Vec<String> = self.text.chars().map(|c| format!("U+{:04X}", c as u32)).collect();
        write!(f, "EmojiToken({} {:?} [{}])", self.text, self.kind, cps.join(" "))
    }
}

impl FromStr for EmojiToken {
    type Err = EmojiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl AsRef<str> for EmojiToken {
    fn as_ref(&self) -> &str {
        &self.text
    }
}

impl Serialize for EmojiToken {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for EmojiToken {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        EmojiToken::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A piece of segmented text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Span<'a> {
    Emoji(EmojiToken),
    Text(&'a str),
}

impl Span<'_> {
    pub fn as_str(&self) -> &str {
        match self {
            Span::Emoji(t) => t.as_str(),
            Span::Text(s) => s,
        }
    }
}

/// True if `c` has the Unicode Emoji property or is one of the structural
/// scalars emoji sequences are built from.
pub fn is_emoji_scalar(c: char) -> bool {
    is_structural(c) || in_emoji_table(c)
}

/// ZWJ, VS16, keycap, skin-tone modifiers, regional indicators and tag characters.
pub fn is_structural(c: char) -> bool {
    c == ZWJ
        || c == VS16
        || c == KEYCAP
        || c == TAG_CANCEL
        || is_skin_tone(c)
        || is_regional_indicator(c)
        || TAG_SPEC.contains(&(c as u32))
}

fn in_emoji_table(c: char) -> bool {
    let cp = c as u32;
    EMOJI_RANGES
        .binary_search_by(|&(lo, hi)| {
            if hi < cp {
                std::cmp::Ordering::Less
            } else if lo > cp {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Equal
            }
        })
        .is_ok()
}

pub fn is_regional_indicator(c: char) -> bool {
    ('\u{1F1E6}'..='\u{1F1FF}').contains(&c)
}

pub fn is_skin_tone(c: char) -> bool {
    ('\u{1F3FB}'..='\u{1F3FF}').contains(&c)
}

fn is_keycap_base(c: char) -> bool {
    c.is_ascii_digit() || c == '#' || c == '*'
}

/// End (exclusive) of the single emoji element starting at `start`, if any.
///
/// An element is a flag pair, a lone regional indicator, a keycap, or a
/// pictograph followed by its optional VS16, skin-tone modifier and tag run.
fn element_end(chars: &[char], start: usize) -> Option<usize> {
    let c = *chars.get(start)?;
    let at = |i: usize| chars.get(i).copied();

    if is_regional_indicator(c) {
        return Some(if at(start + 1).is_some_and(is_regional_indicator) { start + 2 } else { start + 1 });
    }
    if is_keycap_base(c) {
        return match (at(start + 1), at(start + 2)) {
            (Some(VS16), Some(KEYCAP)) => Some(start + 3),
            (Some(KEYCAP), _) => Some(start + 2),
            _ => None,
        };
    }
    if !in_emoji_table(c) {
        return None;
    }

    let mut i = start + 1;
    if at(i) == Some(VS16) {
        i += 1;
    }
    if !is_skin_tone(c) && at(i).is_some_and(is_skin_tone) {
        i += 1;
        if at(i) == Some(VS16) {
            i += 1;
        }
    }
    let tags_start = i;
    while at(i).is_some_and(|t| TAG_SPEC.contains(&(t as u32))) {
        i += 1;
    }
    if i > tags_start && at(i) == Some(TAG_CANCEL) {
        i += 1;
    }
    Some(i)
}

/// End (exclusive) of the maximal emoji token starting at `start`.
fn token_end(chars: &[char], start: usize) -> Option<usize> {
    let mut end = element_end(chars, start)?;
    while chars.get(end) == Some(&ZWJ) {
        match element_end(chars, end + 1) {
            Some(next) => end = next,
            None => break,
        }
    }
    Some(end)
}

fn classify(text: &str) -> EmojiKind {
    let chars: Vec<char> = text.chars().collect();
    if chars.contains(&ZWJ) {
        EmojiKind::ZwjComposed
    } else if chars.len() == 2 && chars.iter().all(|&c| is_regional_indicator(c)) {
        EmojiKind::FlagSequence
    } else if is_keycap_base(chars[0]) && chars.last() == Some(&KEYCAP) {
        EmojiKind::Keycap
    } else if chars[1..].iter().any(|&c| is_skin_tone(c) || TAG_SPEC.contains(&(c as u32))) {
        EmojiKind::ModifiedBase
    } else {
        EmojiKind::Base
    }
}

/// Splits `text` into emoji tokens and the non-emoji text between them.
///
/// Grouping is maximal munch: a ZWJ sequence is always one token, and a
/// trailing VS16 or skin-tone modifier stays with the emoji it follows.
pub fn segment(text: &str) -> Vec<Span<'_>> {
    let indexed: Vec<(usize, char)> = text.char_indices().collect();
    let chars: Vec<char> = indexed.iter().map(|&(_, c)| c).collect();
    let byte_at = |i: usize| indexed.get(i).map_or(text.len(), |&(b, _)| b);

    let mut spans = Vec::new();
    let mut text_start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        match token_end(&chars, i) {
            Some(end) => {
                let (lo, hi) = (byte_at(i), byte_at(end));
                if byte_at(text_start) < lo {
                    spans.push(Span::Text(&text[byte_at(text_start)..lo]));
                }
                spans.push(Span::Emoji(EmojiToken::from_valid(text[lo..hi].to_string())));
                i = end;
                text_start = end;
            }
            None => i += 1,
        }
    }
    if byte_at(text_start) < text.len() {
        spans.push(Span::Text(&text[byte_at(text_start)..]));
    }
    spans
}

/// The emoji tokens of `text`, dropping everything else.
pub fn emoji_tokens(text: &str) -> Vec<EmojiToken> {
    segment(text)
        .into_iter()
        .filter_map(|s| match s {
            Span::Emoji(t) => Some(t),
            Span::Text(_) => None,
        })
        .collect()
}

/// Splits a ZWJ-composed token into its constituents; other kinds map to
/// themselves. Constituents are always separated by exactly one U+200D, so
/// [`recompose`] inverts this.
pub fn decompose(token: &EmojiToken) -> Vec<EmojiToken> {
    if token.kind != EmojiKind::ZwjComposed {
        return vec![token.clone()];
    }
    token.text.split(ZWJ).map(|part| EmojiToken::from_valid(part.to_string())).collect()
}

/// Joins `parts` with U+200D into a single token.
pub fn recompose(parts: &[EmojiToken]) -> Result<EmojiToken, EmojiError> {
    match parts {
        [] => Err(EmojiError::EmptyParts),
        [single] => Ok(single.clone()),
        _ => {
            let joined = parts.iter().map(EmojiToken::as_str).collect::<Vec<_>>().join(ZWJ_STR);
            EmojiToken::parse(&joined)
        }
    }
}

/// Decomposes every token and interleaves `ZWJ_STR` separators, giving the
/// flat token stream the translator trains on.
pub fn to_parts<'a, I>(tokens: I) -> Vec<String>
where
    I: IntoIterator<Item = &'a EmojiToken>,
{
    let mut out = Vec::new();
    for token in tokens {
        for (i, part) in decompose(token).into_iter().enumerate() {
            if i > 0 {
                out.push(ZWJ_STR.to_string());
            }
            out.push(part.into_string());
        }
    }
    out
}

/// Inverse of [`to_parts`] for decoder output: parts separated by a
/// `ZWJ_STR` token are joined back into composed tokens. Dangling joiners
/// and strings that are not emoji are dropped.
pub fn from_parts<S: AsRef<str>>(parts: &[S]) -> Vec<EmojiToken> {
    let mut out = Vec::new();
    let mut group: Vec<EmojiToken> = Vec::new();
    let mut join_next = false;
    for part in parts {
        let part = part.as_ref();
        if part == ZWJ_STR {
            join_next = !group.is_empty();
            continue;
        }
        let Ok(token) = EmojiToken::parse(part) else {
            continue;
        };
        if !join_next && !group.is_empty() {
            out.extend(recompose(&group).ok());
            group.clear();
        }
        group.push(token);
        join_next = false;
    }
    if !group.is_empty() {
        out.extend(recompose(&group).ok());
    }
    out
}
