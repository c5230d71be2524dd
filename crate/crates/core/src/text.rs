//! Text-side tokenization: lowercase words split on whitespace with
//! surrounding punctuation trimmed.

/// Lowercased words of `text`. Emoji and punctuation at word edges are
/// dropped; inner apostrophes and hyphens are kept ("don't", "well-known").
pub fn words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|w| {
            let w = w.trim_matches(|c: char| !c.is_alphanumeric());
            (!w.is_empty()).then(|| w.to_lowercase())
        })
        .collect()
}

/// Number of whitespace-delimited words, the unit used for corpus length stats.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_and_lowercases() {
        assert_eq!(words("I love my Dog! 🐶"), vec!["i", "love", "my", "dog"]);
        assert_eq!(words("don't  \"stop\" well-known"), vec!["don't", "stop", "well-known"]);
        assert!(words("  ... ").is_empty());
    }

    #[test]
    fn counts_whitespace_words() {
        assert_eq!(word_count("one two  three"), 3);
        assert_eq!(word_count(""), 0);
    }
}
