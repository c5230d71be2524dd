use super::em::unit_log_prob;
use super::{alignment_units, Lexicon, NULL_ID};
use crate::corpus::Corpus;

/// Largest number of target tokens one source token may produce.
pub const MAX_FERTILITY: usize = 8;

/// Add-β constant for fertility estimates.
const SMOOTHING: f64 = 0.01;

/// Smallest skip probability assigned when a source has no fertility row.
pub(crate) const SKIP_FLOOR: f64 = 1e-6;

/// n(φ | source): how many target tokens each source token produces.
///
/// Estimated from Viterbi alignments under a trained lexicon; a composed
/// emoji contributes all of its parts to the source it aligns to. A source
/// without a row falls back to a skip/emit-one split derived from how much
/// of its lexicon mass clears the emission threshold.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FertilityTable {
    /// Indexed by lexicon source id; empty for sources without estimates.
    pub(crate) rows: Vec<Vec<f64>>,
}

impl FertilityTable {
    pub fn estimate(lexicon: &Lexicon, corpus: &Corpus) -> Self {
        let width = MAX_FERTILITY + 1;
        let mut counts = vec![vec![0.0f64; width]; lexicon.source_vocab.len()];
        let mut seen = vec![false; lexicon.source_vocab.len()];
        for inst in corpus {
            let (src, tgt) = lexicon.direction.sides(inst);
            let ids: Vec<u32> = std::iter::once(Some(NULL_ID))
                .chain(src.iter().map(|w| lexicon.source_id(w)))
                .map(|id| id.unwrap_or(NULL_ID))
                .collect();
            let Some(target) = tgt.iter().map(|t| lexicon.target_id(t)).collect::<Option<Vec<u32>>>() else {
                continue;
            };
            let mut fert = vec![0usize; ids.len()];
            for unit in alignment_units(&tgt) {
                let tokens = &target[unit];
                let mut best = (0, unit_log_prob(lexicon, ids[0], tokens));
                for (i, &e) in ids.iter().enumerate().skip(1) {
                    let lp = unit_log_prob(lexicon, e, tokens);
                    if lp > best.1 {
                        best = (i, lp);
                    }
                }
                fert[best.0] += tokens.len();
            }
            for (i, &e) in ids.iter().enumerate().skip(1) {
                counts[e as usize][fert[i].min(MAX_FERTILITY)] += 1.0;
                seen[e as usize] = true;
            }
        }
        let rows = counts
            .into_iter()
            .zip(seen)
            .map(|(row, seen)| {
                if !seen {
                    return Vec::new();
                }
                let total: f64 = row.iter().sum::<f64>() + SMOOTHING * width as f64;
                row.iter().map(|c| (c + SMOOTHING) / total).collect()
            })
            .collect();
        Self { rows }
    }

    /// Estimated distribution for a source id, if any.
    pub fn row(&self, source: u32) -> Option<&[f64]> {
        self.rows.get(source as usize).filter(|r| !r.is_empty()).map(Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    /// n(φ | source) for φ in 0..=MAX_FERTILITY, with the lexicon fallback.
    pub(crate) fn distribution(&self, lexicon: &Lexicon, source: u32, threshold: f64) -> Vec<f64> {
        if let Some(row) = self.row(source) {
            return row.to_vec();
        }
        let mass: f64 = lexicon.row_ids(source).iter().map(|&(_, p)| p).filter(|&p| p >= threshold).sum();
        let mut dist = vec![0.0; MAX_FERTILITY + 1];
        if mass > 0.0 {
            dist[0] = (1.0 - mass).max(SKIP_FLOOR);
            dist[1] = 1.0 - dist[0];
        } else {
            dist[0] = 1.0;
        }
        dist
    }
}
