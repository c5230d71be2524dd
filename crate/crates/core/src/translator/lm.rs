use std::collections::{BTreeSet, HashMap};

use super::{Direction, TranslatorError};
use crate::corpus::Corpus;

/// Add-α smoothed unigram or bigram model over target tokens.
///
/// The bigram model conditions the first token on a sentence-start context
/// and predicts a sentence-end outcome after the last one, so each
/// conditional ranges over V + 1 outcomes. The unigram model ranges over
/// the V vocabulary tokens and has no boundary terms.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramLM {
    pub(crate) order: u8,
    pub(crate) alpha: f64,
    pub(crate) vocab: Vec<String>,
    pub(crate) index: HashMap<String, u32>,
    pub(crate) unigram: Vec<u64>,
    pub(crate) total: u64,
    /// Keyed by (context, outcome); context V is sentence start, outcome V is sentence end.
    pub(crate) bigram: HashMap<(u32, u32), u64>,
    /// Outgoing count per context, length V + 1.
    pub(crate) context: Vec<u64>,
}

impl NgramLM {
    /// Counts `sequences` of target tokens.
    pub fn train<S: AsRef<[String]>>(sequences: &[S], order: u8, alpha: f64) -> Result<Self, TranslatorError> {
        if !(order == 1 || order == 2) {
            return Err(TranslatorError::InvalidConfig(format!("LM order must be 1 or 2, got {order}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(TranslatorError::InvalidConfig(format!("LM alpha must be > 0, got {alpha}")));
        }
        if sequences.is_empty() {
            return Err(TranslatorError::EmptySplit);
        }
        let vocab: Vec<String> =
            sequences.iter().flat_map(|s| s.as_ref().iter().cloned()).collect::<BTreeSet<_>>().into_iter().collect();
        let index: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        let v = vocab.len() as u32;
        let mut lm = Self {
            order,
            alpha,
            unigram: vec![0; vocab.len()],
            total: 0,
            bigram: HashMap::new(),
            context: vec![0; vocab.len() + 1],
            vocab,
            index,
        };
        for seq in sequences {
            let mut prev = v;
            for tok in seq.as_ref() {
                let id = lm.index[tok];
                lm.unigram[id as usize] += 1;
                lm.total += 1;
                *lm.bigram.entry((prev, id)).or_insert(0) += 1;
                lm.context[prev as usize] += 1;
                prev = id;
            }
            *lm.bigram.entry((prev, v)).or_insert(0) += 1;
            lm.context[prev as usize] += 1;
        }
        Ok(lm)
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn token_id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    fn v(&self) -> u32 {
        self.vocab.len() as u32
    }

    /// p(next | prev). `prev = None` is sentence start; `next = None` is
    /// sentence end (probability 1 under the unigram model).
    pub fn prob(&self, prev: Option<&str>, next: Option<&str>) -> f64 {
        let v = self.v();
        // Unknown tokens get an id past every real one and thus zero counts.
        let id = |t: Option<&str>| t.map_or(v, |t| self.token_id(t).unwrap_or(v + 1));
        self.prob_ids(id(prev), id(next))
    }

    /// Ids in `0..V` are tokens, `V` is the boundary, anything larger is unknown.
    pub(crate) fn prob_ids(&self, prev: u32, next: u32) -> f64 {
        let v = self.v();
        let a = self.alpha;
        match self.order {
            1 => {
                if next == v {
                    return 1.0;
                }
                let c = self.unigram.get(next as usize).copied().unwrap_or(0);
                (c as f64 + a) / (self.total as f64 + a * v as f64)
            }
            _ => {
                let ctx = self.context.get(prev as usize).copied().unwrap_or(0);
                let c = self.bigram.get(&(prev, next)).copied().unwrap_or(0);
                (c as f64 + a) / (ctx as f64 + a * (v as f64 + 1.0))
            }
        }
    }

    pub(crate) fn boundary(&self) -> u32 {
        self.v()
    }

    /// Log-probability of a whole sequence including boundary terms.
    pub fn log_prob(&self, tokens: &[String]) -> f64 {
        let mut prev = None;
        let mut lp = 0.0;
        for t in tokens {
            lp += self.prob(prev, Some(t)).ln();
            prev = Some(t.as_str());
        }
        lp + self.prob(prev, None).ln()
    }
}

/// Trains the target-side LM of `direction` on a split.
pub fn train_lm(corpus: &Corpus, direction: Direction, order: u8, alpha: f64) -> Result<NgramLM, TranslatorError> {
    let targets: Vec<Vec<String>> = corpus.iter().map(|i| direction.sides(i).1).collect();
    NgramLM::train(&targets, order, alpha)
}
