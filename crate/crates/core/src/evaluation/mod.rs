//! Corpus BLEU, macro-F1 and the blinded pairwise preference protocol.

use std::path::PathBuf;

mod bleu;
mod f1;
mod jsonl;
mod preference;

pub use bleu::{bleu, bleu_with, BleuReport, Smoothing};
pub use f1::{macro_f1, per_class_f1};
pub use jsonl::{read_jsonl, write_jsonl};
pub use preference::{
    aggregate_preferences, build_preference_tasks, Choice, ItemOutcome, Judgment, PreferenceItem, PreferenceSummary,
    PreferenceTask,
};

#[derive(Debug, thiserror::Error)]
pub enum EvaluationError {
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("no input to evaluate")]
    EmptyInput,
    #[error("max_n must be at least 1")]
    InvalidOrder,
    #[error("gold label {0:?} is not one of the classes")]
    UnknownLabel(String),
    #[error("item {item_id} has an even number of judgments ({votes})")]
    EvenVoteCount { item_id: String, votes: usize },
    #[error("item {0} has no judgments")]
    MissingJudgments(String),
    #[error("evaluator {evaluator_id} judged item {item_id} more than once")]
    DuplicateJudgment { item_id: String, evaluator_id: String },
    #[error("judgment refers to unknown item {0}")]
    UnknownItem(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
}
