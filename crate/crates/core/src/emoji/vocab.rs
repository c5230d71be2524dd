use std::collections::BTreeMap;

use super::EmojiToken;

/// Frequency table over emoji tokens, keyed by exact codepoint sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EmojiVocabulary {
    counts: BTreeMap<EmojiToken, u64>,
}

impl EmojiVocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, token: &EmojiToken) {
        *self.counts.entry(token.clone()).or_insert(0) += 1;
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn frequency(&self, token: &EmojiToken) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn contains(&self, token: &EmojiToken) -> bool {
        self.counts.contains_key(token)
    }

    /// Entries in codepoint order.
    pub fn iter(&self) -> impl Iterator<Item = (&EmojiToken, u64)> {
        self.counts.iter().map(|(t, &c)| (t, c))
    }

    /// The `k` most frequent tokens, ties broken by codepoint order.
    pub fn top_k(&self, k: usize) -> Vec<(EmojiToken, u64)> {
        let mut ranked: Vec<(EmojiToken, u64)> = self.iter().map(|(t, c)| (t.clone(), c)).collect();
        // stable sort keeps the BTreeMap's codepoint order among equal counts
        ranked.sort_by_key(|e| std::cmp::Reverse(e.1));
        ranked.truncate(k);
        ranked
    }
}

impl<'a> Extend<&'a EmojiToken> for EmojiVocabulary {
    fn extend<I: IntoIterator<Item = &'a EmojiToken>>(&mut self, iter: I) {
        for t in iter {
            self.add(t);
        }
    }
}

impl<'a> FromIterator<&'a EmojiToken> for EmojiVocabulary {
    fn from_iter<I: IntoIterator<Item = &'a EmojiToken>>(iter: I) -> Self {
        let mut v = Self::new();
        v.extend(iter);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn top_k_orders_by_count_then_codepoint() {
        let dog = EmojiToken::parse("🐶").unwrap();
        let cat = EmojiToken::parse("🐱").unwrap();
        let heart = EmojiToken::parse("❤").unwrap();
        let mut v = EmojiVocabulary::new();
        for _ in 0..5 {
            v.add(&dog);
        }
        for _ in 0..3 {
            v.add(&heart);
            v.add(&cat);
        }
        let top = v.top_k(3);
        // ❤ (U+2764) sorts before 🐱 (U+1F431)
        assert_eq!(top, vec![(dog, 5), (heart, 3), (cat, 3)]);
        assert!(v.iter().all(|(_, c)| c >= 1));
    }
}
