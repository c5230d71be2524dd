//! Bidirectional English/emoji translation toolkit.
//!
//! - [`emoji`]: Unicode-correct emoji segmentation and ZWJ decomposition.
//! - [`corpus`]: parallel-corpus synthesis from an LLM provider, filtering,
//!   persistence, statistics and splitting.
//! - [`translator`]: EM-trained lexical translation model, n-gram language
//!   model, beam decoder and a string-matching baseline.
//! - [`evaluation`]: corpus BLEU, macro-F1 and the pairwise preference protocol.
//! - [`transfer`]: classification by translating text to a label emoji.
//! - [`synthetic`]: seeded data with known ground truth.

pub mod corpus;
pub mod emoji;
pub mod evaluation;
pub mod synthetic;
pub mod text;
pub mod transfer;
pub mod translator;

pub use emoji::{EmojiKind, EmojiToken, Span};
