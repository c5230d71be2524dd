use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::CorpusError;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("no recorded completion for prompt hash {0}")]
    MissingTranscript(String),
    #[error("provider backend: {0}")]
    Backend(String),
}

/// One completion request.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompletionRequest<'a> {
    pub prompt: &'a str,
    pub temperature: f64,
    pub seed: Option<u64>,
}

/// Anything that turns a prompt into raw completion text.
pub trait LlmProvider: Send + Sync {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError>;
}

/// Hex SHA-256 of the prompt text; the key of replay transcripts.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// One line of a replay transcript file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub prompt_hash: String,
    pub completion: String,
}

/// Serves pre-recorded completions.
///
/// Records sharing a prompt hash keep their file order; a request with seed
/// `s` receives record `s mod n` of its prompt, so the output is a pure
/// function of (prompt, seed).
#[derive(Debug, Clone, Default)]
pub struct ReplayProvider {
    records: HashMap<String, Vec<String>>,
}

impl ReplayProvider {
    pub fn new(records: impl IntoIterator<Item = TranscriptRecord>) -> Self {
        let mut map: HashMap<String, Vec<String>> = HashMap::new();
        for r in records {
            map.entry(r.prompt_hash).or_default().push(r.completion);
        }
        Self { records: map }
    }

    /// Reads a JSON-lines transcript file.
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: TranscriptRecord = serde_json::from_str(line)
                .map_err(|e| CorpusError::Malformed { line: i + 1, message: e.to_string() })?;
            records.push(rec);
        }
        Ok(Self::new(records))
    }

    pub fn len(&self) -> usize {
        self.records.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl LlmProvider for ReplayProvider {
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<String, ProviderError> {
        let hash = prompt_hash(request.prompt);
        let recs = self.records.get(&hash).ok_or(ProviderError::MissingTranscript(hash))?;
        let idx = request.seed.unwrap_or(0) % recs.len() as u64;
        Ok(recs[idx as usize].clone())
    }
}
