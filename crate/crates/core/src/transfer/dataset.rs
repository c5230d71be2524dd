use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{LabelMap, TransferError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledRecord {
    pub id: String,
    pub text: String,
    pub label: String,
}

impl LabeledRecord {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: impl Into<String>) -> Self {
        Self { id: id.into(), text: text.into(), label: label.into() }
    }
}

/// Train and test records with disjoint ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    train: Vec<LabeledRecord>,
    test: Vec<LabeledRecord>,
}

fn read_tsv(path: &Path, prefix: &str) -> Result<Vec<LabeledRecord>, TransferError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| TransferError::Io { path: path.to_path_buf(), source })?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (body, label) = line.rsplit_once('\t').ok_or_else(|| TransferError::Malformed {
            path: path.to_path_buf(),
            line: i + 1,
            message: "expected text<TAB>label".into(),
        })?;
        records.push(LabeledRecord::new(format!("{prefix}-{}", i + 1), body, label.trim()));
    }
    Ok(records)
}

impl LabeledDataset {
    pub fn new(train: Vec<LabeledRecord>, test: Vec<LabeledRecord>) -> Result<Self, TransferError> {
        let mut ids = HashSet::new();
        for r in train.iter().chain(&test) {
            if !ids.insert(r.id.as_str()) {
                return Err(TransferError::InvalidConfig(format!("record id {:?} appears twice", r.id)));
            }
        }
        Ok(Self { train, test })
    }

    /// Loads two `text<TAB>label` files. Record ids are `train-<line>` and
    /// `test-<line>`.
    pub fn load(train: &Path, test: &Path) -> Result<Self, TransferError> {
        Self::new(read_tsv(train, "train")?, read_tsv(test, "test")?)
    }

    pub fn train(&self) -> &[LabeledRecord] {
        &self.train
    }

    pub fn test(&self) -> &[LabeledRecord] {
        &self.test
    }

    /// Fails on the first record whose class is missing from `labels`.
    pub fn validate(&self, labels: &LabelMap) -> Result<(), TransferError> {
        match self.train.iter().chain(&self.test).find(|r| !labels.contains(&r.label)) {
            Some(r) => Err(TransferError::UnknownClass(r.label.clone())),
            None => Ok(()),
        }
    }

    /// Training records grouped by class, in class-name then file order.
    pub fn train_by_class(&self) -> BTreeMap<&str, Vec<&LabeledRecord>> {
        let mut by_class: BTreeMap<&str, Vec<&LabeledRecord>> = BTreeMap::new();
        for r in &self.train {
            by_class.entry(r.label.as_str()).or_default().push(r);
        }
        by_class
    }
}

/// Exactly `k` training records per class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FewShotSample {
    pub k: usize,
    pub seed: u64,
    /// Per class, in training-file order.
    pub per_class: BTreeMap<String, Vec<LabeledRecord>>,
}

impl FewShotSample {
    /// All sampled records, class by class.
    pub fn records(&self) -> Vec<LabeledRecord> {
        self.per_class.values().flatten().cloned().collect()
    }
}

/// Uniform sample without replacement of `k` training records from every
/// class present in the training split. Classes are visited in name order
/// and share one generator seeded with `seed`.
pub fn sample_few_shot(dataset: &LabeledDataset, k: usize, seed: u64) -> Result<FewShotSample, TransferError> {
    if k == 0 {
        return Err(TransferError::InvalidConfig("k must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_class = BTreeMap::new();
    for (class, records) in dataset.train_by_class() {
        if records.len() < k {
            return Err(TransferError::InsufficientClassSize { class: class.to_string(), available: records.len(), k });
        }
        let mut picked = sample(&mut rng, records.len(), k).into_vec();
        picked.sort_unstable();
        per_class.insert(class.to_string(), picked.into_iter().map(|i| records[i].clone()).collect());
    }
    if per_class.is_empty() {
        return Err(TransferError::EmptyTrain);
    }
    Ok(FewShotSample { k, seed, per_class })
}
