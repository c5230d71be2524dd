//! Statistical text/emoji translator: an alignment-EM lexicon, a target-side
//! n-gram language model and a monotone beam decoder, plus a keyword
//! string-matching baseline.

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Corpus, ParallelInstance};
use crate::emoji::{emoji_tokens, from_parts, to_parts, ZWJ_STR};
use crate::text::words;

mod baseline;
mod decode;
mod em;
mod fertility;
mod lexicon;
mod lm;
mod model_io;

pub use baseline::{translate_string_match, KeywordDictionary};
pub use decode::{decode, DecodeConfig, Hypothesis};
pub use em::{train_em, EmTrainer, TrainingTrace};
pub use fertility::{FertilityTable, MAX_FERTILITY};
pub use lexicon::{Lexicon, NULL_ID, NULL_TOKEN};
pub use lm::{train_lm, NgramLM};
pub use model_io::{FORMAT_VERSION, MAGIC};

#[derive(Debug, thiserror::Error)]
pub enum TranslatorError {
    #[error("training split is empty")]
    EmptySplit,
    #[error("log-likelihood became non-finite at iteration {iteration}")]
    NonFiniteLikelihood { iteration: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid lexicon: {0}")]
    InvalidLexicon(String),
    #[error("model has no trained lexicon entries")]
    UntrainedModel,
    #[error("model translates {model}, requested {requested}")]
    DirectionMismatch { model: Direction, requested: Direction },
    #[error("corrupt model file: {0}")]
    CorruptFile(String),
    #[error("model file version {found} is not supported (expected {supported})")]
    VersionMismatch { found: u16, supported: u16 },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("dictionary line {line}: {message}")]
    InvalidDictionary { line: usize, message: String },
}

/// Translation direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "t2e")]
    TextToEmoji,
    #[serde(rename = "e2t")]
    EmojiToText,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::TextToEmoji => "t2e",
            Direction::EmojiToText => "e2t",
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Direction::TextToEmoji => Direction::EmojiToText,
            Direction::EmojiToText => Direction::TextToEmoji,
        }
    }

    /// Tokens of raw input on this direction's source side.
    pub fn tokenize_source(self, input: &str) -> Vec<String> {
        match self {
            Direction::TextToEmoji => words(input),
            Direction::EmojiToText => to_parts(&emoji_tokens(input)),
        }
    }

    /// Tokens of raw input on this direction's target side.
    pub fn tokenize_target(self, input: &str) -> Vec<String> {
        self.reverse().tokenize_source(input)
    }

    /// `(source, target)` token sequences of one instance.
    pub fn sides(self, inst: &ParallelInstance) -> (Vec<String>, Vec<String>) {
        let text = words(inst.text());
        let emoji = to_parts(inst.emoji());
        match self {
            Direction::TextToEmoji => (text, emoji),
            Direction::EmojiToText => (emoji, text),
        }
    }

    /// Renders decoder output: emoji parts are recomposed, words are joined
    /// with single spaces. Returns the output string and its display tokens.
    pub fn render(self, target: &[String]) -> (String, Vec<String>) {
        match self {
            Direction::TextToEmoji => {
                let tokens: Vec<String> = from_parts(target).into_iter().map(|t| t.into_string()).collect();
                (tokens.concat(), tokens)
            }
            Direction::EmojiToText => (target.join(" "), target.to_vec()),
        }
    }
}

/// Alignment units of a target sequence: each composed emoji (its parts and
/// the joiners between them) forms one unit, every other token its own.
pub(crate) fn alignment_units(tokens: &[String]) -> Vec<Range<usize>> {
    let mut units: Vec<Range<usize>> = Vec::new();
    let mut join = false;
    for (i, tok) in tokens.iter().enumerate() {
        match units.last_mut() {
            Some(last) if tok == ZWJ_STR || join => {
                last.end = i + 1;
                join = tok == ZWJ_STR;
            }
            _ => {
                units.push(i..i + 1);
                join = tok == ZWJ_STR;
            }
        }
    }
    units
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t2e" => Ok(Direction::TextToEmoji),
            "e2t" => Ok(Direction::EmojiToText),
            other => Err(format!("unknown direction {other:?} (expected t2e or e2t)")),
        }
    }
}

/// Options for [`TranslationModel::train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOptions {
    pub iterations: usize,
    /// Recorded with the model; initialization itself is uniform.
    pub seed: u64,
    pub lm_order: u8,
    pub lm_alpha: f64,
    pub decode: DecodeConfig,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { iterations: 10, seed: 0, lm_order: 2, lm_alpha: 0.1, decode: DecodeConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub instances: u64,
    pub iterations: u32,
    pub seed: u64,
}

/// Output of [`TranslationModel::translate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Translation {
    pub output: String,
    /// Display tokens: whole emojis for text-to-emoji, words otherwise.
    pub tokens: Vec<String>,
    pub log_score: f64,
}

/// A trained direction-tagged translator. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationModel {
    pub lexicon: Lexicon,
    pub fertility: FertilityTable,
    pub lm: NgramLM,
    pub config: DecodeConfig,
    pub summary: TrainingSummary,
}

impl TranslationModel {
    /// Trains lexicon, fertility table and LM on one split.
    pub fn train(
        corpus: &Corpus,
        direction: Direction,
        options: &TrainOptions,
    ) -> Result<(Self, TrainingTrace), TranslatorError> {
        options.decode.validate()?;
        let (lexicon, trace) = train_em(corpus, direction, options.iterations, options.seed)?;
        let fertility = FertilityTable::estimate(&lexicon, corpus);
        let lm = train_lm(corpus, direction, options.lm_order, options.lm_alpha)?;
        let summary = TrainingSummary {
            instances: corpus.len() as u64,
            iterations: options.iterations as u32,
            seed: options.seed,
        };
        Ok((Self { lexicon, fertility, lm, config: options.decode.clone(), summary }, trace))
    }

    /// Bundles hand-built parts; the fertility table is left empty so every
    /// source falls back to its lexicon-derived default.
    pub fn from_parts(lexicon: Lexicon, lm: NgramLM, config: DecodeConfig) -> Result<Self, TranslatorError> {
        config.validate()?;
        Ok(Self {
            lexicon,
            fertility: FertilityTable::default(),
            lm,
            config,
            summary: TrainingSummary { instances: 0, iterations: 0, seed: 0 },
        })
    }

    pub fn direction(&self) -> Direction {
        self.lexicon.direction()
    }

    /// Decodes pre-tokenized source tokens with the model's own config.
    pub fn translate_tokens(&self, direction: Direction, source: &[String]) -> Result<Hypothesis, TranslatorError> {
        if direction != self.direction() {
            return Err(TranslatorError::DirectionMismatch { model: self.direction(), requested: direction });
        }
        decode(self, source, &self.config)
    }

    /// Tokenizes, decodes and renders raw input.
    pub fn translate(&self, input: &str) -> Result<Translation, TranslatorError> {
        let direction = self.direction();
        let hyp = self.translate_tokens(direction, &direction.tokenize_source(input))?;
        let (output, tokens) = direction.render(&hyp.tokens);
        Ok(Translation { output, tokens, log_score: hyp.log_score })
    }

    /// Short content hash of the serialized model.
    pub fn model_id(&self) -> String {
        let digest = Sha256::digest(self.to_bytes());
        format!("{}-{}", self.direction(), hex::encode(&digest[..6]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{filter_instance, Origin};

    #[test]
    fn units_group_composed_parts() {
        let toks: Vec<String> =
            ["🐶", "🧑", "\u{200d}", "🍳", "🐱", "\u{200d}"].iter().map(|t| t.to_string()).collect();
        assert_eq!(alignment_units(&toks), vec![0..1, 1..4, 4..6]);
        let words: Vec<String> = ["a", "b"].iter().map(|t| t.to_string()).collect();
        assert_eq!(alignment_units(&words), vec![0..1, 1..2]);
    }

    #[test]
    fn direction_round_trips() {
        for d in [Direction::TextToEmoji, Direction::EmojiToText] {
            assert_eq!(d.as_str().parse::<Direction>().unwrap(), d);
            assert_eq!(serde_json::to_string(&d).unwrap(), format!("\"{d}\""));
        }
        assert!("x2y".parse::<Direction>().is_err());
    }

    #[test]
    fn sides_are_swapped() {
        let inst = filter_instance("The Doctor!", "👩\u{200d}⚕️", "t", Origin::Startup).unwrap();
        let (s, t) = Direction::TextToEmoji.sides(&inst);
        assert_eq!(s, vec!["the", "doctor"]);
        assert_eq!(t, vec!["👩", "\u{200d}", "⚕️"]);
        assert_eq!(Direction::EmojiToText.sides(&inst), (t.clone(), s));
        assert_eq!(alignment_units(&t), vec![0..3]);
        let (out, tokens) = Direction::TextToEmoji.render(&t);
        assert_eq!(out, "👩\u{200d}⚕️");
        assert_eq!(tokens.len(), 1);
    }
}
