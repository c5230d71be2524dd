use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use rayon::prelude::*;

use super::{alignment_units, Direction, Lexicon, TranslatorError, NULL_ID};
use crate::corpus::Corpus;

/// Sentences per E-step work unit. Fixed so the reduction order, and hence
/// every floating-point sum, does not depend on the thread count.
const CHUNK: usize = 256;

/// Corpus log-likelihood recorded during training.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingTrace {
    /// Entry `k` is the log-likelihood under the parameters after `k`
    /// M-steps; entry 0 is the uniform initialization.
    pub log_likelihoods: Vec<f64>,
}

impl TrainingTrace {
    /// True when no entry drops below its predecessor by more than `tol`.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.log_likelihoods.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    pub fn final_log_likelihood(&self) -> Option<f64> {
        self.log_likelihoods.last().copied()
    }
}

struct Sentence {
    /// Source ids with NULL at position 0.
    source: Vec<u32>,
    target: Vec<u32>,
    units: Vec<Range<usize>>,
}

/// ln Σ exp(x) over `xs`; `-inf` when every term is.
pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// ln p(unit | e) = Σ over the unit's tokens of ln t(token | e).
pub(crate) fn unit_log_prob(lexicon: &Lexicon, e: u32, tokens: &[u32]) -> f64 {
    tokens.iter().map(|&f| lexicon.prob_ids(e, f).ln()).sum()
}

/// Step-wise alignment EM over one corpus split.
///
/// Every target alignment unit (a single token, or all parts of one
/// composed emoji) links to exactly one source position, NULL included,
/// chosen uniformly a priori. A unit's probability under source `e` is the
/// product of t(part | e) over its parts, so for sequences without
/// compositions this is the classic single-token lexical model.
pub struct EmTrainer {
    lexicon: Lexicon,
    sentences: Vec<Sentence>,
    /// Start of each source row in the flat count vector.
    offsets: Vec<usize>,
    trace: TrainingTrace,
}

impl EmTrainer {
    /// Tokenizes the split and initializes t(f|e) uniformly over the targets
    /// co-occurring with each source (NULL co-occurs with every target).
    pub fn new(corpus: &Corpus, direction: Direction) -> Result<Self, TranslatorError> {
        if corpus.is_empty() {
            return Err(TranslatorError::EmptySplit);
        }
        let sides: Vec<(Vec<String>, Vec<String>)> = corpus.iter().map(|i| direction.sides(i)).collect();
        let sources: BTreeSet<String> = sides.iter().flat_map(|(s, _)| s.iter().cloned()).collect();
        let targets: BTreeSet<String> = sides.iter().flat_map(|(_, t)| t.iter().cloned()).collect();
        let mut lexicon = Lexicon::with_vocab(direction, sources, targets);

        let sentences: Vec<Sentence> = sides
            .iter()
            .map(|(s, t)| Sentence {
                source: std::iter::once(NULL_ID).chain(s.iter().map(|w| lexicon.source_index[w])).collect(),
                target: t.iter().map(|w| lexicon.target_index[w]).collect(),
                units: alignment_units(t),
            })
            .collect();

        let mut cooc: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); lexicon.source_vocab.len()];
        for s in &sentences {
            for &e in &s.source {
                cooc[e as usize].extend(s.target.iter().copied());
            }
        }
        let mut offsets = Vec::with_capacity(cooc.len());
        let mut nnz = 0;
        for (row, targets) in lexicon.rows.iter_mut().zip(cooc) {
            offsets.push(nnz);
            nnz += targets.len();
            let p = 1.0 / targets.len().max(1) as f64;
            *row = targets.into_iter().map(|t| (t, p)).collect();
        }
        Ok(Self { lexicon, sentences, offsets, trace: TrainingTrace::default() })
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn trace(&self) -> &TrainingTrace {
        &self.trace
    }

    pub fn iterations_done(&self) -> usize {
        self.trace.log_likelihoods.len()
    }

    fn flat_index(&self, e: u32, f: u32) -> usize {
        let row = &self.lexicon.rows[e as usize];
        let pos = row.binary_search_by_key(&f, |&(t, _)| t).expect("co-occurring pair present in row");
        self.offsets[e as usize] + pos
    }

    /// Expected counts and log-likelihood for one chunk of sentences.
    fn e_step_chunk(&self, chunk: &[Sentence]) -> (HashMap<usize, f64>, f64) {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        let mut ll = 0.0;
        let mut logs = Vec::new();
        for s in chunk {
            let norm = (s.source.len() as f64).ln();
            for unit in &s.units {
                let tokens = &s.target[unit.clone()];
                logs.clear();
                logs.extend(s.source.iter().map(|&e| unit_log_prob(&self.lexicon, e, tokens)));
                let log_denom = log_sum_exp(&logs);
                ll += log_denom - norm;
                for (&e, &lw) in s.source.iter().zip(&logs) {
                    let posterior = (lw - log_denom).exp();
                    for &f in tokens {
                        *counts.entry(self.flat_index(e, f)).or_insert(0.0) += posterior;
                    }
                }
            }
        }
        (counts, ll)
    }

    /// One EM iteration. Returns the log-likelihood of the parameters the
    /// E-step ran under.
    pub fn step(&mut self) -> Result<f64, TranslatorError> {
        let iteration = self.iterations_done();
        let partials: Vec<(HashMap<usize, f64>, f64)> =
            self.sentences.par_chunks(CHUNK).map(|c| self.e_step_chunk(c)).collect();

        let nnz = self.lexicon.nnz();
        let mut counts = vec![0.0; nnz];
        let mut ll = 0.0;
        for (chunk_counts, chunk_ll) in partials {
            ll += chunk_ll;
            let mut entries: Vec<(usize, f64)> = chunk_counts.into_iter().collect();
            entries.sort_unstable_by_key(|&(i, _)| i);
            for (i, c) in entries {
                counts[i] += c;
            }
        }
        if !ll.is_finite() {
            return Err(TranslatorError::NonFiniteLikelihood { iteration });
        }
        self.trace.log_likelihoods.push(ll);

        for (e, row) in self.lexicon.rows.iter_mut().enumerate() {
            let start = self.offsets[e];
            let slice = &counts[start..start + row.len()];
            let total: f64 = slice.iter().sum();
            if total > 0.0 {
                for ((_, p), c) in row.iter_mut().zip(slice) {
                    *p = c / total;
                }
            }
        }
        Ok(ll)
    }

    /// Log-likelihood of the split under the current parameters.
    pub fn log_likelihood(&self) -> f64 {
        self.sentences.par_chunks(CHUNK).map(|c| self.e_step_chunk(c).1).collect::<Vec<f64>>().into_iter().sum()
    }

    /// Ends training, appending the likelihood of the final parameters.
    pub fn finish(mut self) -> Result<(Lexicon, TrainingTrace), TranslatorError> {
        let ll = self.log_likelihood();
        if !ll.is_finite() {
            return Err(TranslatorError::NonFiniteLikelihood { iteration: self.iterations_done() });
        }
        self.trace.log_likelihoods.push(ll);
        Ok((self.lexicon, self.trace))
    }
}

/// Trains a lexicon with `iterations` EM steps. `init_seed` is recorded by
/// callers; initialization is uniform and needs no randomness.
pub fn train_em(
    corpus: &Corpus,
    direction: Direction,
    iterations: usize,
    _init_seed: u64,
) -> Result<(Lexicon, TrainingTrace), TranslatorError> {
    if iterations == 0 {
        return Err(TranslatorError::InvalidConfig("iterations must be at least 1".into()));
    }
    let mut trainer = EmTrainer::new(corpus, direction)?;
    for _ in 0..iterations {
        trainer.step()?;
    }
    trainer.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{filter_instance, Origin};

    fn corpus(pairs: &[(&str, &str)]) -> Corpus {
        pairs.iter().map(|(t, e)| filter_instance(t, e, "t", Origin::Startup).unwrap()).collect()
    }

    #[test]
    fn learns_dog_and_cat() {
        let c = corpus(&[("dog", "🐶"), ("cat", "🐱"), ("dog cat", "🐶🐱")]);
        let (lex, trace) = train_em(&c, Direction::TextToEmoji, 20, 0).unwrap();
        assert!(lex.prob("dog", "🐶") > 0.95);
        assert!(lex.prob("cat", "🐱") > 0.95);
        assert_eq!(trace.log_likelihoods.len(), 21);
        assert!(trace.is_monotone(1e-9));
    }

    #[test]
    fn single_instance_rows_are_normalized() {
        let c = corpus(&[("dog", "🐶")]);
        let (lex, _) = train_em(&c, Direction::TextToEmoji, 3, 0).unwrap();
        for (_, sum) in lex.row_sums() {
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert_eq!(lex.prob("dog", "🐶"), 1.0);
        assert_eq!(lex.prob(crate::translator::NULL_TOKEN, "🐶"), 1.0);
    }

    #[test]
    fn more_iterations_never_hurt() {
        let c = corpus(&[("a dog runs", "🐶🏃"), ("a cat", "🐱"), ("dog and cat", "🐶🐱")]);
        let l1 = train_em(&c, Direction::TextToEmoji, 1, 0).unwrap().1.final_log_likelihood().unwrap();
        let l2 = train_em(&c, Direction::TextToEmoji, 2, 0).unwrap().1.final_log_likelihood().unwrap();
        assert!(l2 >= l1 - 1e-9);
    }

    #[test]
    fn errors() {
        assert!(matches!(train_em(&Corpus::default(), Direction::TextToEmoji, 1, 0), Err(TranslatorError::EmptySplit)));
        let c = corpus(&[("dog", "🐶")]);
        assert!(matches!(train_em(&c, Direction::TextToEmoji, 0, 0), Err(TranslatorError::InvalidConfig(_))));
    }
}
