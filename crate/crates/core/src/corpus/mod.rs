//! Text/emoji parallel corpus: synthesis from an LLM provider, filtering,
//! persistence, statistics and train/dev/test splitting.

mod io;
mod parse;
mod prompt;
mod provider;
mod split;
mod stats;
mod synth;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::emoji::EmojiToken;

pub use io::{CorpusWriter, InstanceSink};
pub use parse::{filter_instance, parse_completion, ParseOutcome, Rejection};
pub use prompt::{render_conditioned_prompt, render_startup_prompt, DEFAULT_TOPICS};
pub use provider::{prompt_hash, CompletionRequest, LlmProvider, ProviderError, ReplayProvider, TranscriptRecord};
pub use split::{split, SplitAssignment};
pub use stats::{compute_stats, CorpusStats};
pub use synth::{synthesize, SynthesisConfig, SynthesisReport};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("topic must not be empty")]
    EmptyTopic,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("corpus has {0} instances; at least 10 are needed to split 8/1/1")]
    TooSmall(usize),
    #[error("invalid synthesis config: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: invalid instance: {reason}")]
    InvalidRecord { line: usize, reason: Rejection },
    #[error("provider failed on prompt {prompt:?}: {source}")]
    Provider {
        prompt: String,
        #[source]
        source: ProviderError,
    },
    #[error("writing corpus: {0}")]
    Write(#[source] std::io::Error),
}

/// How an instance entered the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Startup,
    InstanceConditioned,
    Imported,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Startup => "startup",
            Origin::InstanceConditioned => "instance_conditioned",
            Origin::Imported => "imported",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "startup" => Ok(Origin::Startup),
            "instance_conditioned" => Ok(Origin::InstanceConditioned),
            "imported" => Ok(Origin::Imported),
            other => Err(format!("unknown origin {other:?}")),
        }
    }
}

/// One text/emoji-sequence pair.
///
/// Construct through [`filter_instance`], which enforces a non-empty trimmed
/// text and at least one emoji token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelInstance {
    text: String,
    emoji: Vec<EmojiToken>,
    topic: String,
    origin: Origin,
    id: String,
}

impl ParallelInstance {
    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn emoji(&self) -> &[EmojiToken] {
        &self.emoji
    }

    /// The emoji side as raw concatenated codepoints.
    pub fn emoji_string(&self) -> String {
        self.emoji.iter().map(EmojiToken::as_str).collect()
    }

    pub fn topic(&self) -> &str {
        &self.topic
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Deduplication key: exact text plus exact emoji codepoints.
    pub fn dedup_key(&self) -> (String, String) {
        (self.text.clone(), self.emoji_string())
    }
}

/// Content-derived identifier: first 16 hex digits of SHA-256 over text and emoji.
pub fn instance_id(text: &str, emoji: &str) -> String {
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.update([0u8]);
    h.update(emoji.as_bytes());
    hex::encode(&h.finalize()[..8])
}

/// An ordered collection of parallel instances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    instances: Vec<ParallelInstance>,
}

impl Corpus {
    pub fn new(instances: Vec<ParallelInstance>) -> Self {
        Self { instances }
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[ParallelInstance] {
        &self.instances
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ParallelInstance> {
        self.instances.iter()
    }

    pub fn push(&mut self, inst: ParallelInstance) {
        self.instances.push(inst);
    }

    pub fn into_instances(self) -> Vec<ParallelInstance> {
        self.instances
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a ParallelInstance;
    type IntoIter = std::slice::Iter<'a, ParallelInstance>;

    fn into_iter(self) -> Self::IntoIter {
        self.instances.iter()
    }
}

impl FromIterator<ParallelInstance> for Corpus {
    fn from_iter<I: IntoIterator<Item = ParallelInstance>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}
