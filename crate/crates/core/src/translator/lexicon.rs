use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Direction, TranslatorError};

/// Source-side token that absorbs target tokens with no counterpart.
pub const NULL_TOKEN: &str = "<NULL>";

/// Index of [`NULL_TOKEN`] in every lexicon's source vocabulary.
pub const NULL_ID: u32 = 0;

/// Sparse lexical translation table t(target | source).
///
/// Source id 0 is always the NULL token. Target ids follow codepoint order
/// of the target strings, so comparing ids compares tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub(crate) direction: Direction,
    pub(crate) source_vocab: Vec<String>,
    pub(crate) target_vocab: Vec<String>,
    pub(crate) source_index: HashMap<String, u32>,
    pub(crate) target_index: HashMap<String, u32>,
    /// Per source id: (target id, probability), sorted by target id.
    pub(crate) rows: Vec<Vec<(u32, f64)>>,
}

impl Lexicon {
    /// Builds vocabularies from token sets; every row starts empty.
    pub(crate) fn with_vocab(direction: Direction, sources: BTreeSet<String>, targets: BTreeSet<String>) -> Self {
        let mut source_vocab = vec![NULL_TOKEN.to_string()];
        source_vocab.extend(sources.into_iter().filter(|s| s != NULL_TOKEN));
        let target_vocab: Vec<String> = targets.into_iter().collect();
        let source_index = source_vocab.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let target_index = target_vocab.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let rows = vec![Vec::new(); source_vocab.len()];
        Self { direction, source_vocab, target_vocab, source_index, target_index, rows }
    }

    /// Builds a lexicon from explicit `(source, target, probability)` entries.
    /// Use [`NULL_TOKEN`] as the source for NULL entries. Every non-empty
    /// row must sum to 1 within 1e-6.
    pub fn from_entries<I, S, T>(direction: Direction, entries: I) -> Result<Self, TranslatorError>
    where
        I: IntoIterator<Item = (S, T, f64)>,
        S: Into<String>,
        T: Into<String>,
    {
        let mut table: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
        for (s, t, p) in entries {
            if !(0.0..=1.0).contains(&p) {
                return Err(TranslatorError::InvalidLexicon(format!("probability {p} out of range")));
            }
            *table.entry(s.into()).or_default().entry(t.into()).or_insert(0.0) += p;
        }
        let sources = table.keys().cloned().collect();
        let targets = table.values().flat_map(|r| r.keys().cloned()).collect();
        let mut lex = Self::with_vocab(direction, sources, targets);
        for (s, row) in table {
            let sum: f64 = row.values().sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(TranslatorError::InvalidLexicon(format!("row {s:?} sums to {sum}")));
            }
            let sid = lex.source_index[&s] as usize;
            lex.rows[sid] = row.into_iter().map(|(t, p)| (lex.target_index[&t], p)).collect();
        }
        Ok(lex)
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Source vocabulary, NULL first.
    pub fn source_vocab(&self) -> &[String] {
        &self.source_vocab
    }

    pub fn target_vocab(&self) -> &[String] {
        &self.target_vocab
    }

    pub fn source_id(&self, token: &str) -> Option<u32> {
        self.source_index.get(token).copied()
    }

    pub fn target_id(&self, token: &str) -> Option<u32> {
        self.target_index.get(token).copied()
    }

    pub fn target(&self, id: u32) -> &str {
        &self.target_vocab[id as usize]
    }

    /// Number of source tokens (including NULL) with at least one entry.
    pub fn trained_rows(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_empty()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.trained_rows() == 0
    }

    /// t(target | source); 0 for unseen pairs.
    pub fn prob(&self, source: &str, target: &str) -> f64 {
        match (self.source_id(source), self.target_id(target)) {
            (Some(s), Some(t)) => self.prob_ids(s, t),
            _ => 0.0,
        }
    }

    pub(crate) fn prob_ids(&self, source: u32, target: u32) -> f64 {
        let row = &self.rows[source as usize];
        row.binary_search_by_key(&target, |&(t, _)| t).map_or(0.0, |i| row[i].1)
    }

    /// Entries of one source row as `(target, probability)` in target order.
    pub fn row(&self, source: &str) -> Vec<(&str, f64)> {
        self.source_id(source)
            .map(|s| self.rows[s as usize].iter().map(|&(t, p)| (self.target(t), p)).collect())
            .unwrap_or_default()
    }

    pub(crate) fn row_ids(&self, source: u32) -> &[(u32, f64)] {
        &self.rows[source as usize]
    }

    /// Sum of each non-empty row, keyed by source token.
    pub fn row_sums(&self) -> Vec<(&str, f64)> {
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_empty())
            .map(|(s, r)| (self.source_vocab[s].as_str(), r.iter().map(|&(_, p)| p).sum()))
            .collect()
    }

    /// Number of stored (source, target) entries.
    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Targets with t(target | source) ≥ `threshold`, best first; ties by codepoint order.
    pub(crate) fn candidates(&self, source: u32, threshold: f64, limit: usize) -> Vec<(u32, f64)> {
        let mut c: Vec<(u32, f64)> =
            self.rows[source as usize].iter().copied().filter(|&(_, p)| p >= threshold).collect();
        c.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        c.truncate(limit);
        c
    }
}
