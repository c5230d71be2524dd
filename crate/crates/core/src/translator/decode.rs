use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{TranslationModel, TranslatorError, MAX_FERTILITY, NULL_ID};

/// Emission candidates considered per source token.
const MAX_CANDIDATES: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub beam_size: usize,
    pub max_length: usize,
    /// Minimum t(target | source) for a target to be emitted.
    pub lexical_threshold: f64,
    /// Weight of the LM term; the lexical term gets `1 - lm_weight`.
    pub lm_weight: f64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        Self { beam_size: 4, max_length: 64, lexical_threshold: 0.2, lm_weight: 0.3 }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<(), TranslatorError> {
        let bad = |m: &str| Err(TranslatorError::InvalidConfig(m.to_string()));
        if self.beam_size == 0 {
            return bad("beam_size must be at least 1");
        }
        if self.max_length == 0 {
            return bad("max_length must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.lexical_threshold) {
            return bad("lexical_threshold must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.lm_weight) {
            return bad("lm_weight must lie in [0, 1]");
        }
        Ok(())
    }
}

/// A complete decoder output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hypothesis {
    /// Target tokens; for emoji targets these are decomposed parts.
    pub tokens: Vec<String>,
    pub log_score: f64,
}

#[derive(Clone)]
struct Item {
    /// Lexicon target ids.
    tokens: Vec<u32>,
    /// LM id of the last token, or the LM boundary id at sentence start.
    prev: u32,
    score: f64,
}

/// Higher score first; equal scores fall back to codepoint order of the
/// token sequence (target ids are assigned in that order).
fn rank(a: &Item, b: &Item) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.tokens.cmp(&b.tokens))
}

fn prune(mut items: Vec<Item>, width: usize) -> Vec<Item> {
    items.sort_by(rank);
    let mut seen = HashSet::new();
    items.retain(|i| seen.insert(i.tokens.clone()));
    items.truncate(width);
    items
}

struct Search<'a> {
    model: &'a TranslationModel,
    config: &'a DecodeConfig,
    /// LM id per lexicon target id.
    lm_ids: Vec<u32>,
}

impl Search<'_> {
    fn emit(&self, item: &Item, target: u32, t: f64) -> Item {
        let lambda = self.config.lm_weight;
        let next = self.lm_ids[target as usize];
        let lm = self.model.lm.prob_ids(item.prev, next);
        let mut tokens = item.tokens.clone();
        tokens.push(target);
        Item { tokens, prev: next, score: item.score + (1.0 - lambda) * t.ln() + lambda * lm.ln() }
    }

    fn run(&self, source: &[String], width: usize) -> Item {
        let lex = &self.model.lexicon;
        let lambda = self.config.lm_weight;
        let mut beam = vec![Item { tokens: Vec::new(), prev: self.model.lm.boundary(), score: 0.0 }];
        for word in source {
            let Some(sid) = lex.source_id(word).filter(|&s| s != NULL_ID) else {
                continue;
            };
            let cands = lex.candidates(sid, self.config.lexical_threshold, MAX_CANDIDATES);
            let fert = self.model.fertility.distribution(lex, sid, self.config.lexical_threshold);
            let mut next = Vec::new();
            for item in &beam {
                for (phi, &p) in fert.iter().enumerate().take(MAX_FERTILITY + 1) {
                    if p <= 0.0 || (phi > 0 && cands.is_empty()) || item.tokens.len() + phi > self.config.max_length {
                        continue;
                    }
                    let mut partial = vec![Item { score: item.score + (1.0 - lambda) * p.ln(), ..item.clone() }];
                    for _ in 0..phi {
                        let grown =
                            partial.iter().flat_map(|it| cands.iter().map(|&(e, t)| self.emit(it, e, t))).collect();
                        partial = prune(grown, width);
                    }
                    next.extend(partial);
                }
            }
            beam = prune(next, width);
        }
        let end = self.model.lm.boundary();
        let finished = beam
            .into_iter()
            .map(|it| Item { score: it.score + lambda * self.model.lm.prob_ids(it.prev, end).ln(), ..it });
        prune(finished.collect(), 1).pop().expect("skipping keeps the beam non-empty")
    }
}

/// Monotone beam search over `source`. Each source token produces between
/// zero and [`MAX_FERTILITY`] target tokens drawn from its lexicon row.
///
/// The result never scores below the greedy (width 1) search.
pub fn decode(
    model: &TranslationModel,
    source: &[String],
    config: &DecodeConfig,
) -> Result<Hypothesis, TranslatorError> {
    config.validate()?;
    if model.lexicon.is_empty() {
        return Err(TranslatorError::UntrainedModel);
    }
    let unknown = model.lm.boundary() + 1;
    let lm_ids = model.lexicon.target_vocab().iter().map(|t| model.lm.token_id(t).unwrap_or(unknown)).collect();
    let search = Search { model, config, lm_ids };

    let mut best = search.run(source, config.beam_size);
    if config.beam_size > 1 {
        let greedy = search.run(source, 1);
        if rank(&greedy, &best) == Ordering::Less {
            best = greedy;
        }
    }
    let lex = &model.lexicon;
    Ok(Hypothesis { tokens: best.tokens.iter().map(|&t| lex.target(t).to_string()).collect(), log_score: best.score })
}
