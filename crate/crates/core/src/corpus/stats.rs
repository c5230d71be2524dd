use serde::Serialize;

use super::{Corpus, CorpusError};
use crate::emoji::{EmojiToken, EmojiVocabulary};
use crate::text::word_count;

/// Summary statistics of a corpus.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub instance_count: usize,
    pub emoji_vocab_size: usize,
    /// Mean whitespace-delimited word count of the text side.
    pub avg_text_length: f64,
    /// Mean emoji-token count of the emoji side.
    pub avg_emoji_length: f64,
    pub top_k_emojis: Vec<(EmojiToken, u64)>,
}

pub fn compute_stats(corpus: &Corpus, k: usize) -> Result<CorpusStats, CorpusError> {
    if corpus.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut vocab = EmojiVocabulary::new();
    let mut words = 0usize;
    let mut emojis = 0usize;
    for inst in corpus {
        words += word_count(inst.text());
        emojis += inst.emoji().len();
        vocab.extend(inst.emoji());
    }
    let n = corpus.len() as f64;
    Ok(CorpusStats {
        instance_count: corpus.len(),
        emoji_vocab_size: vocab.len(),
        avg_text_length: words as f64 / n,
        avg_emoji_length: emojis as f64 / n,
        top_k_emojis: vocab.top_k(k),
    })
}
