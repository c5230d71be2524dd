use std::collections::BTreeMap;
use std::path::Path;

use super::TransferError;
use crate::emoji::EmojiToken;

/// Names of the label maps shipped with the crate.
pub const BUNDLED_LABEL_MAPS: [&str; 4] = ["ag_news", "dbpedia", "emotion", "sentiment"];

fn bundled_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "ag_news" => include_str!("../../data/labelmaps/ag_news.tsv"),
        "dbpedia" => include_str!("../../data/labelmaps/dbpedia.tsv"),
        "emotion" => include_str!("../../data/labelmaps/emotion.tsv"),
        "sentiment" => include_str!("../../data/labelmaps/sentiment.tsv"),
        _ => return None,
    })
}

/// Injective class name to label emoji mapping, iterated in class-name order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    entries: BTreeMap<String, EmojiToken>,
}

impl LabelMap {
    pub fn new<I, S>(entries: I) -> Result<Self, TransferError>
    where
        I: IntoIterator<Item = (S, EmojiToken)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (class, emoji) in entries {
            map.insert(class.into(), emoji);
        }
        let mut owner: BTreeMap<&EmojiToken, &String> = BTreeMap::new();
        for (class, emoji) in &map {
            if let Some(first) = owner.insert(emoji, class) {
                return Err(TransferError::DuplicateEmoji {
                    first: first.clone(),
                    second: class.clone(),
                    emoji: emoji.to_string(),
                });
            }
        }
        if map.is_empty() {
            return Err(TransferError::InvalidLabelMap { line: 0, message: "no classes".into() });
        }
        Ok(Self { entries: map })
    }

    /// Parses `class<TAB>emoji` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, TransferError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| TransferError::InvalidLabelMap { line: i + 1, message };
            let (class, emoji) = line.split_once('\t').ok_or_else(|| err("expected class<TAB>emoji".into()))?;
            let class = class.trim();
            if class.is_empty() {
                return Err(err("empty class name".into()));
            }
            if entries.iter().any(|(c, _)| c == class) {
                return Err(err(format!("class {class:?} listed twice")));
            }
            let token = EmojiToken::parse(emoji.trim()).map_err(|e| err(e.to_string()))?;
            entries.push((class.to_string(), token));
        }
        Self::new(entries)
    }

    pub fn load(path: &Path) -> Result<Self, TransferError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| TransferError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// One of [`BUNDLED_LABEL_MAPS`].
    pub fn bundled(name: &str) -> Result<Self, TransferError> {
        let source = bundled_source(name).ok_or_else(|| TransferError::UnknownLabelMap(name.to_string()))?;
        Self::parse(source)
    }

    pub fn get(&self, class: &str) -> Option<&EmojiToken> {
        self.entries.get(class)
    }

    pub fn contains(&self, class: &str) -> bool {
        self.entries.contains_key(class)
    }

    /// Class names in lexicographic order.
    pub fn classes(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &EmojiToken)> {
        self.entries.iter().map(|(c, e)| (c.as_str(), e))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_maps_are_injective() {
        for name in BUNDLED_LABEL_MAPS {
            let map = LabelMap::bundled(name).unwrap();
            assert!(map.len() >= 3, "{name}");
        }
        assert_eq!(LabelMap::bundled("dbpedia").unwrap().len(), 14);
        assert!(matches!(LabelMap::bundled("nope"), Err(TransferError::UnknownLabelMap(_))));
    }

    #[test]
    fn rejects_shared_emoji_and_bad_lines() {
        assert!(matches!(LabelMap::parse("a\t😀\nb\t😀"), Err(TransferError::DuplicateEmoji { .. })));
        assert!(matches!(LabelMap::parse("a 😀"), Err(TransferError::InvalidLabelMap { line: 1, .. })));
        assert!(matches!(LabelMap::parse("a\tx"), Err(TransferError::InvalidLabelMap { line: 1, .. })));
        assert!(matches!(LabelMap::parse("a\t😀\na\t😭"), Err(TransferError::InvalidLabelMap { line: 2, .. })));
    }
}
