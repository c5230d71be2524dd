use std::collections::BTreeMap;

use super::{LabelMap, LabeledRecord, TransferError};
use crate::text::words;
use crate::translator::{Direction, Lexicon};

const LEXICON_FLOOR: f64 = 1e-3;

/// Per-word distributions over label emojis. Words never seen in training
/// score every class equally.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelScorer {
    classes: Vec<String>,
    emojis: Vec<String>,
    rows: BTreeMap<String, Vec<f64>>,
}

impl LabelScorer {
    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    /// Label emoji of each class, in [`Self::classes`] order.
    pub fn emojis(&self) -> &[String] {
        &self.emojis
    }

    /// Distribution of `word` over the classes, if the word was seen.
    pub fn row(&self, word: &str) -> Option<&[f64]> {
        self.rows.get(word).map(Vec::as_slice)
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// Mean log probability of each class emoji over the words of `text`.
    /// Texts without words score 0 everywhere.
    pub fn scores(&self, text: &str) -> Vec<f64> {
        let words = words(text);
        let c = self.classes.len();
        let uniform = -(c as f64).ln();
        let mut total = vec![0.0; c];
        for w in &words {
            match self.rows.get(w) {
                Some(row) => total.iter_mut().zip(row).for_each(|(t, p)| *t += p.ln()),
                None => total.iter_mut().for_each(|t| *t += uniform),
            }
        }
        if !words.is_empty() {
            let n = words.len() as f64;
            total.iter_mut().for_each(|t| *t /= n);
        }
        total
    }

    /// Class scores keyed by class name.
    pub fn score_map(&self, text: &str) -> BTreeMap<String, f64> {
        self.classes.iter().cloned().zip(self.scores(text)).collect()
    }

    /// Builds a scorer from a text-to-emoji lexicon. A word's weight for a
    /// class is the probability of the class emoji's parts, renormalized over
    /// the label emojis and mixed with a small uniform floor so every score
    /// stays finite. Words giving no label any mass are left out.
    pub fn from_lexicon(lexicon: &Lexicon, labels: &LabelMap) -> Result<Self, TransferError> {
        if lexicon.direction() != Direction::TextToEmoji {
            return Err(TransferError::InvalidConfig("label scoring needs a text-to-emoji lexicon".into()));
        }
        let parts: Vec<Vec<String>> =
            labels.iter().map(|(_, e)| Direction::TextToEmoji.tokenize_target(e.as_str())).collect();
        let mut rows = BTreeMap::new();
        for word in lexicon.source_vocab() {
            let weights: Vec<f64> = parts
                .iter()
                .map(|p| p.iter().filter(|t| *t != "\u{200d}").map(|t| lexicon.prob(word, t)).product())
                .collect();
            let mass: f64 = weights.iter().sum();
            if mass > 0.0 {
                let floor = LEXICON_FLOOR / weights.len() as f64;
                rows.insert(word.clone(), weights.iter().map(|w| (1.0 - LEXICON_FLOOR) * w / mass + floor).collect());
            }
        }
        Ok(Self {
            classes: labels.classes(),
            emojis: labels.iter().map(|(_, e)| e.as_str().to_string()).collect(),
            rows,
        })
    }
}

/// Counts every word occurrence once toward its record's class:
/// t(class | w) = (n(w, class) + α) / (n(w) + α·C). An infinite α gives
/// uniform rows.
pub fn fit_classifier(records: &[LabeledRecord], labels: &LabelMap, alpha: f64) -> Result<LabelScorer, TransferError> {
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(TransferError::InvalidConfig(format!("smoothing must be positive, got {alpha}")));
    }
    if records.is_empty() {
        return Err(TransferError::EmptyTrain);
    }
    let classes = labels.classes();
    let c = classes.len();
    let mut counts: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for r in records {
        let idx = classes.binary_search(&r.label).map_err(|_| TransferError::UnknownClass(r.label.clone()))?;
        for w in words(&r.text) {
            counts.entry(w).or_insert_with(|| vec![0; c])[idx] += 1;
        }
    }
    let rows = counts
        .into_iter()
        .map(|(w, n)| {
            let row = if alpha.is_infinite() {
                vec![1.0 / c as f64; c]
            } else {
                let denom = n.iter().sum::<u64>() as f64 + alpha * c as f64;
                n.iter().map(|&k| (k as f64 + alpha) / denom).collect()
            };
            (w, row)
        })
        .collect();
    Ok(LabelScorer { emojis: labels.iter().map(|(_, e)| e.as_str().to_string()).collect(), classes, rows })
}

/// Highest-scoring class; ties go to the lexicographically first class.
pub fn predict(scorer: &LabelScorer, text: &str) -> String {
    argmax(&scorer.classes, &scorer.scores(text)).to_string()
}

pub(crate) fn argmax<'a>(classes: &'a [String], scores: &[f64]) -> &'a str {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    &classes[best]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emoji::EmojiToken;

    fn labels() -> LabelMap {
        LabelMap::new([("happy", EmojiToken::parse("😀").unwrap()), ("sad", EmojiToken::parse("😭").unwrap())]).unwrap()
    }

    fn records() -> Vec<LabeledRecord> {
        vec![LabeledRecord::new("1", "happy day", "happy"), LabeledRecord::new("2", "sad news", "sad")]
    }

    #[test]
    fn memorizes_training_points() {
        let s = fit_classifier(&records(), &labels(), 0.1).unwrap();
        assert_eq!(predict(&s, "happy day"), "happy");
        assert_eq!(predict(&s, "sad news"), "sad");
    }

    #[test]
    fn rows_are_normalized() {
        let s = fit_classifier(&records(), &labels(), 0.5).unwrap();
        for w in s.vocabulary() {
            assert!((s.row(w).unwrap().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn infinite_smoothing_ties() {
        let s = fit_classifier(&records(), &labels(), f64::INFINITY).unwrap();
        let scores = s.scores("sad news");
        assert_eq!(scores[0], scores[1]);
        assert_eq!(predict(&s, "sad news"), "happy");
    }

    #[test]
    fn unseen_words_fall_to_tie_break() {
        let s = fit_classifier(&records(), &labels(), 0.1).unwrap();
        let scores = s.scores("zebra quantum");
        assert!(scores.iter().all(|x| x.is_finite()));
        assert_eq!(predict(&s, "zebra quantum"), "happy");
        assert_eq!(predict(&s, ""), "happy");
    }

    #[test]
    fn single_class() {
        let map = LabelMap::new([("only", EmojiToken::parse("🙂").unwrap())]).unwrap();
        let s = fit_classifier(&[LabeledRecord::new("1", "x y", "only")], &map, 1.0).unwrap();
        assert_eq!(predict(&s, "anything at all"), "only");
    }

    #[test]
    fn errors() {
        assert!(matches!(fit_classifier(&[], &labels(), 1.0), Err(TransferError::EmptyTrain)));
        let bad = [LabeledRecord::new("1", "x", "angry")];
        assert!(matches!(fit_classifier(&bad, &labels(), 1.0), Err(TransferError::UnknownClass(_))));
        assert!(fit_classifier(&records(), &labels(), 0.0).is_err());
    }

    #[test]
    fn lexicon_scorer() {
        let lex = Lexicon::from_entries(
            Direction::TextToEmoji,
            [("joy", "😀", 0.9), ("joy", "🐶", 0.1), ("tears", "😭", 1.0), ("dog", "🐶", 1.0)],
        )
        .unwrap();
        let s = LabelScorer::from_lexicon(&lex, &labels()).unwrap();
        let joy = s.row("joy").unwrap();
        assert!((joy[0] - 0.9995).abs() < 1e-12 && (joy[1] - 0.0005).abs() < 1e-12);
        assert!(s.row("dog").is_none());
        assert_eq!(predict(&s, "tears and a dog"), "sad");
    }
}
