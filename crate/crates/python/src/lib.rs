//! Python module `emotrans`: segmentation, training and translation,
//! BLEU and macro-F1, the keyword baseline and the transfer harness.

use std::path::PathBuf;

use emotrans_core::corpus::{compute_stats, Corpus};
use emotrans_core::emoji::{self, EmojiToken};
use emotrans_core::evaluation;
use emotrans_core::synthetic::{oracle_corpus, OracleConfig};
use emotrans_core::transfer::{run_experiment, LabelMap, LabeledDataset, TransferMode};
use emotrans_core::translator::{translate_string_match, Direction, KeywordDictionary, TrainOptions, TranslationModel};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_direction(s: &str) -> PyResult<Direction> {
    s.parse().map_err(value_err)
}

/// A trained one-direction translation model.
#[pyclass(name = "TranslationModel", module = "emotrans", frozen)]
struct PyTranslationModel {
    inner: TranslationModel,
}

#[pymethods]
impl PyTranslationModel {
    /// Trains on a corpus file (JSON lines or CSV) in direction "t2e" or "e2t".
    #[staticmethod]
    #[pyo3(signature = (corpus_path, direction, iterations = 10))]
    fn train(corpus_path: PathBuf, direction: &str, iterations: usize) -> PyResult<Self> {
        let corpus = Corpus::load_any(&corpus_path).map_err(value_err)?;
        let options = TrainOptions { iterations, ..TrainOptions::default() };
        let (inner, _) = TranslationModel::train(&corpus, parse_direction(direction)?, &options).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: TranslationModel::load(&path).map_err(value_err)? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).map_err(value_err)
    }

    /// Returns `(output, tokens, log_score)`.
    fn translate(&self, text: &str) -> PyResult<(String, Vec<String>, f64)> {
        let t = self.inner.translate(text).map_err(value_err)?;
        Ok((t.output, t.tokens, t.log_score))
    }

    #[getter]
    fn model_id(&self) -> String {
        self.inner.model_id()
    }

    #[getter]
    fn direction(&self) -> &'static str {
        self.inner.direction().as_str()
    }

    fn __repr__(&self) -> String {
        format!("TranslationModel({})", self.inner.model_id())
    }
}

/// Emoji tokens of `text`, composed sequences kept whole.
#[pyfunction]
fn segment(text: &str) -> Vec<String> {
    emoji::emoji_tokens(text).into_iter().map(EmojiToken::into_string).collect()
}

/// Parts of one emoji token, without joiners.
#[pyfunction]
fn decompose(token: &str) -> PyResult<Vec<String>> {
    let token = EmojiToken::parse(token).map_err(value_err)?;
    Ok(emoji::decompose(&token).into_iter().map(EmojiToken::into_string).collect())
}

#[pyfunction]
#[pyo3(signature = (corpus_path, top_k = 10))]
fn corpus_stats<'py>(py: Python<'py>, corpus_path: PathBuf, top_k: usize) -> PyResult<Bound<'py, PyDict>> {
    let corpus = Corpus::load_any(&corpus_path).map_err(value_err)?;
    let s = compute_stats(&corpus, top_k).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("instance_count", s.instance_count)?;
    d.set_item("emoji_vocab_size", s.emoji_vocab_size)?;
    d.set_item("avg_text_length", s.avg_text_length)?;
    d.set_item("avg_emoji_length", s.avg_emoji_length)?;
    let top: Vec<(String, u64)> = s.top_k_emojis.into_iter().map(|(t, c)| (t.into_string(), c)).collect();
    d.set_item("top_k_emojis", top)?;
    Ok(d)
}

/// Writes the seeded synthetic word/emoji corpus and returns its size.
#[pyfunction]
#[pyo3(signature = (path, sentences = 500, seed = 0))]
fn write_oracle_corpus(path: PathBuf, sentences: usize, seed: u64) -> PyResult<usize> {
    let corpus = oracle_corpus(&OracleConfig { sentences, seed, ..OracleConfig::default() });
    corpus.save(&path).map_err(value_err)?;
    Ok(corpus.len())
}

/// Corpus BLEU-1..BLEU-`max_n` over pre-tokenized sentences.
#[pyfunction]
#[pyo3(signature = (hypotheses, references, max_n = 4))]
fn bleu(hypotheses: Vec<Vec<String>>, references: Vec<Vec<String>>, max_n: usize) -> PyResult<Vec<f64>> {
    Ok(evaluation::bleu(&hypotheses, &references, max_n).map_err(value_err)?.scores)
}

#[pyfunction]
fn macro_f1(predictions: Vec<String>, gold: Vec<String>, classes: Vec<String>) -> PyResult<f64> {
    evaluation::macro_f1(&predictions, &gold, &classes).map_err(value_err)
}

/// Keyword baseline with the bundled dictionary.
#[pyfunction]
fn string_match(text: &str) -> Vec<String> {
    translate_string_match(&KeywordDictionary::bundled(), text).into_iter().map(EmojiToken::into_string).collect()
}

/// Runs the classification harness on two `text<TAB>label` files. `labels`
/// is a label-map file or a bundled map name. Returns `(per_run, mean)`.
#[pyfunction]
#[pyo3(signature = (train_path, test_path, labels, k = None, runs = 5, seed = 0, alpha = 0.1))]
fn transfer_experiment(
    train_path: PathBuf,
    test_path: PathBuf,
    labels: &str,
    k: Option<usize>,
    runs: usize,
    seed: u64,
    alpha: f64,
) -> PyResult<(Vec<f64>, f64)> {
    let labels = if std::path::Path::new(labels).exists() {
        LabelMap::load(std::path::Path::new(labels))
    } else {
        LabelMap::bundled(labels)
    }
    .map_err(value_err)?;
    let dataset = LabeledDataset::load(&train_path, &test_path).map_err(value_err)?;
    let mode = k.map_or(TransferMode::Full, |k| TransferMode::FewShot { k });
    let report = run_experiment(&dataset, &labels, mode, runs, seed, alpha).map_err(value_err)?;
    Ok((report.per_run, report.mean))
}

#[pymodule]
pub fn emotrans(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTranslationModel>()?;
    m.add_function(wrap_pyfunction!(segment, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_stats, m)?)?;
    m.add_function(wrap_pyfunction!(write_oracle_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(bleu, m)?)?;
    m.add_function(wrap_pyfunction!(macro_f1, m)?)?;
    m.add_function(wrap_pyfunction!(string_match, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_experiment, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_functions() {
        assert_eq!(segment("a 👩\u{200d}🍳 and 🐶"), vec!["👩\u{200d}🍳", "🐶"]);
        assert_eq!(decompose("👩\u{200d}🍳").unwrap(), vec!["👩", "🍳"]);
        assert_eq!(string_match("a snake"), vec!["🐍"]);
        let b = bleu(vec![vec!["a".into()]], vec![vec!["a".into(), "b".into()]], 1).unwrap();
        assert!((b[0] - (-1.0f64).exp()).abs() < 1e-12);
    }
}
