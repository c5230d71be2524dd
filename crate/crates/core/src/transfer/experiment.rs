use serde::Serialize;

use super::classifier::argmax;
use super::{fit_classifier, sample_few_shot, LabelMap, LabeledDataset, TransferError};
use crate::evaluation::macro_f1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum TransferMode {
    Full,
    FewShot { k: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub mode: TransferMode,
    pub per_run: Vec<f64>,
    pub mean: f64,
}

/// Fits on the training split (or a k-shot sample of it, seeded
/// `base_seed + r` in run r) and scores test predictions by macro-F1 over
/// the label map's classes.
pub fn run_experiment(
    dataset: &LabeledDataset,
    labels: &LabelMap,
    mode: TransferMode,
    runs: usize,
    base_seed: u64,
    alpha: f64,
) -> Result<ExperimentReport, TransferError> {
    if runs == 0 {
        return Err(TransferError::InvalidConfig("runs must be at least 1".into()));
    }
    dataset.validate(labels)?;
    if dataset.test().is_empty() {
        return Err(TransferError::InvalidConfig("test split is empty".into()));
    }
    let classes = labels.classes();
    let gold: Vec<&str> = dataset.test().iter().map(|r| r.label.as_str()).collect();
    let mut per_run = Vec::with_capacity(runs);
    for r in 0..runs {
        let scorer = match mode {
            TransferMode::Full => fit_classifier(dataset.train(), labels, alpha)?,
            TransferMode::FewShot { k } => {
                let sample = sample_few_shot(dataset, k, base_seed.wrapping_add(r as u64))?;
                fit_classifier(&sample.records(), labels, alpha)?
            }
        };
        let predictions: Vec<&str> =
            dataset.test().iter().map(|rec| argmax(&classes, &scorer.scores(&rec.text))).collect();
        let class_refs: Vec<&str> = classes.iter().map(String::as_str).collect();
        per_run.push(macro_f1(&predictions, &gold, &class_refs)?);
    }
    let mean = per_run.iter().sum::<f64>() / runs as f64;
    Ok(ExperimentReport { mode, per_run, mean })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{separable_dataset, SeparableConfig};

    #[test]
    fn single_run_mean() {
        let (data, labels) = separable_dataset(&SeparableConfig::default());
        let rep = run_experiment(&data, &labels, TransferMode::FewShot { k: 10 }, 1, 3, 0.1).unwrap();
        assert_eq!(rep.per_run.len(), 1);
        assert_eq!(rep.mean, rep.per_run[0]);
    }

    #[test]
    fn separable_full_is_perfect() {
        let cfg = SeparableConfig { noise_rate: 0.0, ..SeparableConfig::default() };
        let (data, labels) = separable_dataset(&cfg);
        let rep = run_experiment(&data, &labels, TransferMode::Full, 2, 0, 0.1).unwrap();
        assert_eq!(rep.mean, 1.0);
    }

    #[test]
    fn zero_runs_rejected() {
        let (data, labels) = separable_dataset(&SeparableConfig::default());
        assert!(run_experiment(&data, &labels, TransferMode::Full, 0, 0, 0.1).is_err());
    }
}
