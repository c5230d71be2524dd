use std::collections::HashMap;
use std::hash::Hash;

use serde::ser::{Serialize, SerializeMap, Serializer};

use super::EvaluationError;

/// Treatment of n-gram orders with zero matches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Smoothing {
    /// Any zero precision makes the score zero.
    #[default]
    None,
    /// Adds one to matched and total counts for orders two and up.
    AddOne,
}

/// Corpus-level BLEU for every order up to `max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BleuReport {
    /// `scores[n - 1]` is BLEU-n.
    pub scores: Vec<f64>,
    /// Modified (clipped) n-gram precision per order.
    pub precisions: Vec<f64>,
    /// 1 when the hypotheses are at least as long as the references, and 0
    /// for an all-empty hypothesis side.
    pub brevity_penalty: f64,
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuReport {
    /// BLEU-n, or `None` past the computed order.
    pub fn b(&self, n: usize) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.scores.get(i)).copied()
    }
}

impl Serialize for BleuReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.scores.len() + 4))?;
        for (i, b) in self.scores.iter().enumerate() {
            map.serialize_entry(&format!("b{}", i + 1), b)?;
        }
        map.serialize_entry("precisions", &self.precisions)?;
        map.serialize_entry("brevity_penalty", &self.brevity_penalty)?;
        map.serialize_entry("hyp_len", &self.hyp_len)?;
        map.serialize_entry("ref_len", &self.ref_len)?;
        map.end()
    }
}

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    for w in tokens.windows(n) {
        *counts.entry(w).or_insert(0) += 1;
    }
    counts
}

pub fn bleu<T: Eq + Hash>(
    hypotheses: &[Vec<T>],
    references: &[Vec<T>],
    max_n: usize,
) -> Result<BleuReport, EvaluationError> {
    bleu_with(hypotheses, references, max_n, Smoothing::None)
}

/// Clipped n-gram matches and candidate counts are summed over the whole
/// corpus before taking each precision.
pub fn bleu_with<T: Eq + Hash>(
    hypotheses: &[Vec<T>],
    references: &[Vec<T>],
    max_n: usize,
    smoothing: Smoothing,
) -> Result<BleuReport, EvaluationError> {
    if hypotheses.len() != references.len() {
        return Err(EvaluationError::LengthMismatch { hypotheses: hypotheses.len(), references: references.len() });
    }
    if hypotheses.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    if max_n == 0 {
        return Err(EvaluationError::InvalidOrder);
    }
    let mut matched = vec![0usize; max_n];
    let mut total = vec![0usize; max_n];
    let (mut hyp_len, mut ref_len) = (0, 0);
    for (hyp, reference) in hypotheses.iter().zip(references) {
        hyp_len += hyp.len();
        ref_len += reference.len();
        for n in 1..=max_n {
            let ref_counts = ngram_counts(reference, n);
            for (gram, c) in ngram_counts(hyp, n) {
                matched[n - 1] += c.min(ref_counts.get(gram).copied().unwrap_or(0));
                total[n - 1] += c;
            }
        }
    }

    let precisions: Vec<f64> = (0..max_n)
        .map(|i| {
            let (m, t) = (matched[i] as f64, total[i] as f64);
            match smoothing {
                Smoothing::AddOne if i > 0 => (m + 1.0) / (t + 1.0),
                _ if total[i] == 0 => 0.0,
                _ => m / t,
            }
        })
        .collect();
    let brevity_penalty = if hyp_len == 0 {
        0.0
    } else if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };

    let mut scores = Vec::with_capacity(max_n);
    let mut log_sum = 0.0;
    let mut zero = false;
    for (i, &p) in precisions.iter().enumerate() {
        zero |= p == 0.0;
        log_sum += if zero { 0.0 } else { p.ln() };
        scores.push(if zero { 0.0 } else { brevity_penalty * (log_sum / (i + 1) as f64).exp() });
    }
    Ok(BleuReport { scores, precisions, brevity_penalty, hyp_len, ref_len })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Vec<String> {
        x.split(' ').filter(|t| !t.is_empty()).map(String::from).collect()
    }

    #[test]
    fn identity_is_one() {
        let c = vec![s("🐱 🐶 🐟 🐍"), s("a b c d e")];
        let r = bleu(&c, &c, 4).unwrap();
        assert_eq!(r.scores, vec![1.0; 4]);
        assert_eq!(r.brevity_penalty, 1.0);
    }

    #[test]
    fn short_hypothesis_is_penalized() {
        let r = bleu(&[s("🐱 🐶")], &[s("🐱 🐶 🐟")], 1).unwrap();
        assert_eq!(r.precisions[0], 1.0);
        assert!((r.b(1).unwrap() - (-0.5f64).exp()).abs() < 1e-12);
        assert!((r.b(1).unwrap() - 0.6065).abs() < 1e-4);
    }

    #[test]
    fn zero_precision_zeroes_score() {
        let r = bleu(&[s("🐟")], &[s("🐱 🐶")], 1).unwrap();
        assert_eq!(r.b(1), Some(0.0));
        let r = bleu(&[s("a b")], &[s("a c")], 2).unwrap();
        assert_eq!(r.b(2), Some(0.0));
        let smoothed = bleu_with(&[s("a b")], &[s("a c")], 2, Smoothing::AddOne).unwrap();
        assert!(smoothed.b(2).unwrap() > 0.0);
    }

    #[test]
    fn clipping_caps_repeats() {
        let r = bleu(&[s("the the the the")], &[s("the cat the mat")], 1).unwrap();
        assert_eq!(r.precisions[0], 0.5);
    }

    #[test]
    fn errors() {
        assert!(matches!(bleu::<String>(&[], &[], 4), Err(EvaluationError::EmptyInput)));
        assert!(matches!(bleu(&[s("a")], &[], 4), Err(EvaluationError::LengthMismatch { .. })));
        assert!(matches!(bleu(&[s("a")], &[s("a")], 0), Err(EvaluationError::InvalidOrder)));
    }

    #[test]
    fn serializes_order_keys() {
        let r = bleu(&[s("a b")], &[s("a b")], 2).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["b1"], 1.0);
        assert_eq!(v["b2"], 1.0);
        assert_eq!(v["hyp_len"], 2);
    }
}
