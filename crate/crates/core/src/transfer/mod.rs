//! Classification by text-to-one-emoji translation: each class is shown as
//! a label emoji and a text is assigned the class whose emoji it translates
//! to best.

use std::path::PathBuf;

use crate::evaluation::EvaluationError;

mod classifier;
mod dataset;
mod experiment;
mod labelmap;

pub use classifier::{fit_classifier, predict, LabelScorer};
pub use dataset::{sample_few_shot, FewShotSample, LabeledDataset, LabeledRecord};
pub use experiment::{run_experiment, ExperimentReport, TransferMode};
pub use labelmap::{LabelMap, BUNDLED_LABEL_MAPS};

#[derive(Debug, thiserror::Error)]
pub enum TransferError {
    #[error("training set is empty")]
    EmptyTrain,
    #[error("class {0:?} is not in the label map")]
    UnknownClass(String),
    #[error("class {class:?} has {available} training records, {k} needed")]
    InsufficientClassSize { class: String, available: usize, k: usize },
    #[error("label map line {line}: {message}")]
    InvalidLabelMap { line: usize, message: String },
    #[error("classes {first:?} and {second:?} share the label emoji {emoji}")]
    DuplicateEmoji { first: String, second: String, emoji: String },
    #[error("unknown bundled label map {0:?}")]
    UnknownLabelMap(String),
    #[error("{path} line {line}: {message}")]
    Malformed { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
}
