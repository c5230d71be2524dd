use std::collections::HashMap;
use std::path::Path;

use super::TranslatorError;
use crate::emoji::EmojiToken;
use crate::text::words;

const BUNDLED: &str = include_str!("../../data/keywords.tsv");

/// Lowercase keyword to emoji lookup for the string-matching baseline.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeywordDictionary {
    entries: HashMap<String, EmojiToken>,
}

impl KeywordDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    /// The dictionary shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled keyword dictionary is valid")
    }

    pub fn load(path: &Path) -> Result<Self, TranslatorError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| TranslatorError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Parses `keyword<TAB>emoji` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, TranslatorError> {
        let mut dict = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| TranslatorError::InvalidDictionary { line: i + 1, message };
            let (key, emoji) = line.split_once('\t').ok_or_else(|| err("expected keyword<TAB>emoji".into()))?;
            let token = EmojiToken::parse(emoji.trim()).map_err(|e| err(e.to_string()))?;
            dict.insert(key.trim(), token);
        }
        Ok(dict)
    }

    pub fn insert(&mut self, keyword: &str, emoji: EmojiToken) {
        self.entries.insert(keyword.to_lowercase(), emoji);
    }

    pub fn get(&self, keyword: &str) -> Option<&EmojiToken> {
        self.entries.get(keyword)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Emits the dictionary emoji of every word that matches a keyword exactly,
/// in order. Other words produce nothing.
pub fn translate_string_match(dictionary: &KeywordDictionary, text: &str) -> Vec<EmojiToken> {
    words(text).iter().filter_map(|w| dictionary.get(w).cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict(pairs: &[(&str, &str)]) -> KeywordDictionary {
        let mut d = KeywordDictionary::new();
        for (k, e) in pairs {
            d.insert(k, EmojiToken::parse(e).unwrap());
        }
        d
    }

    #[test]
    fn matches_per_word() {
        let snake = dict(&[("snake", "🐍")]);
        let out = translate_string_match(&snake, "a snake waits");
        assert_eq!(out.iter().map(|t| t.as_str()).collect::<Vec<_>>(), vec!["🐍"]);
        assert!(translate_string_match(&KeywordDictionary::new(), "hello world").is_empty());
        let dog = dict(&[("dog", "🐶")]);
        assert_eq!(translate_string_match(&dog, "Dog dog!").len(), 2);
    }

    #[test]
    fn bundled_parses() {
        let d = KeywordDictionary::bundled();
        assert!(d.len() > 100);
        assert_eq!(d.get("snake").unwrap().as_str(), "🐍");
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(KeywordDictionary::parse("dog 🐶"), Err(TranslatorError::InvalidDictionary { line: 1, .. })));
        assert!(matches!(
            KeywordDictionary::parse("# c\ndog\tdog"),
            Err(TranslatorError::InvalidDictionary { line: 2, .. })
        ));
    }
}
