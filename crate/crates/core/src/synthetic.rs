//! Seeded synthetic data with known ground truth, for oracle tests and demos.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{filter_instance, Corpus, Origin};
use crate::transfer::{LabelMap, LabeledDataset, LabeledRecord};

/// Word to emoji bijection used by [`oracle_corpus`]. Four entries are
/// ZWJ compositions; apart from their shared 🧑 and joiner, no two entries
/// share a part.
pub const ORACLE_LEXICON: [(&str, &str); 50] = [
    ("snake", "🐍"),
    ("grass", "🌾"),
    ("patiently", "⏳"),
    ("hunting", "🎯"),
    ("dog", "🐶"),
    ("cat", "🐱"),
    ("fish", "🐟"),
    ("bird", "🐦"),
    ("horse", "🐴"),
    ("frog", "🐸"),
    ("bee", "🐝"),
    ("turtle", "🐢"),
    ("whale", "🐳"),
    ("fox", "🦊"),
    ("owl", "🦉"),
    ("pizza", "🍕"),
    ("burger", "🍔"),
    ("cake", "🎂"),
    ("coffee", "☕"),
    ("apple", "🍎"),
    ("banana", "🍌"),
    ("cheese", "🧀"),
    ("bread", "🍞"),
    ("sushi", "🍣"),
    ("car", "🚗"),
    ("bus", "🚌"),
    ("train", "🚆"),
    ("bike", "🚲"),
    ("rocket", "🚀"),
    ("house", "🏠"),
    ("school", "🏫"),
    ("money", "💰"),
    ("gift", "🎁"),
    ("party", "🎉"),
    ("music", "🎵"),
    ("guitar", "🎸"),
    ("book", "📚"),
    ("phone", "📱"),
    ("computer", "💻"),
    ("camera", "📷"),
    ("ball", "⚽"),
    ("fire", "🔥"),
    ("moon", "🌙"),
    ("star", "⭐"),
    ("rainbow", "🌈"),
    ("tree", "🌳"),
    ("doctor", "🧑\u{200d}⚕\u{fe0f}"),
    ("chef", "🧑\u{200d}🍳"),
    ("scientist", "🧑\u{200d}🔬"),
    ("artist", "🧑\u{200d}🎨"),
];

/// Words with no emoji counterpart, sprinkled into oracle sentences.
pub const FUNCTION_WORDS: [&str; 8] = ["the", "a", "my", "in", "with", "and", "very", "some"];

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub sentences: usize,
    pub min_words: usize,
    pub max_words: usize,
    /// Chance that a sentence gets one function word at a random position.
    pub function_word_rate: f64,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { sentences: 500, min_words: 3, max_words: 6, function_word_rate: 0.3, seed: 0 }
    }
}

/// Sentences of distinct content words from [`ORACLE_LEXICON`], each paired
/// with the emojis of those words in the same order.
pub fn oracle_corpus(config: &OracleConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut instances = Vec::with_capacity(config.sentences);
    while instances.len() < config.sentences {
        let n = rng.gen_range(config.min_words..=config.max_words);
        let picks: Vec<&(&str, &str)> = ORACLE_LEXICON.choose_multiple(&mut rng, n).collect();
        let mut words: Vec<&str> = picks.iter().map(|(w, _)| *w).collect();
        let emoji: String = picks.iter().map(|(_, e)| *e).collect();
        if rng.gen_bool(config.function_word_rate) {
            let f = FUNCTION_WORDS[rng.gen_range(0..FUNCTION_WORDS.len())];
            let at = rng.gen_range(0..=words.len());
            words.insert(at, f);
        }
        let inst =
            filter_instance(&words.join(" "), &emoji, "oracle", Origin::Imported).expect("oracle pairs are valid");
        // choose_multiple can repeat a sentence; ids must stay unique for splitting
        if instances.iter().all(|i: &crate::corpus::ParallelInstance| i.id() != inst.id()) {
            instances.push(inst);
        }
    }
    Corpus::new(instances)
}

/// Emoji for an oracle word.
pub fn oracle_emoji(word: &str) -> Option<&'static str> {
    ORACLE_LEXICON.iter().find(|(w, _)| *w == word).map(|(_, e)| *e)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparableConfig {
    /// Bundled label map whose classes are generated.
    pub label_map: String,
    pub words_per_class: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub min_words: usize,
    pub max_words: usize,
    /// Chance that a token is a shared function word instead of a class word.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for SeparableConfig {
    fn default() -> Self {
        Self {
            label_map: "ag_news".into(),
            words_per_class: 12,
            train_per_class: 30,
            test_per_class: 20,
            min_words: 4,
            max_words: 8,
            noise_rate: 0.3,
            seed: 0,
        }
    }
}

/// Vocabulary of one class in [`separable_dataset`]; no word is shared
/// between classes.
pub fn class_words(class: &str, config: &SeparableConfig) -> Vec<String> {
    (0..config.words_per_class).map(|i| format!("{class}{i:02}")).collect()
}

/// Generating probability of `word` under `class`: a mixture of uniform
/// function words (weight `noise_rate`) and uniform class words.
pub fn separable_word_prob(word: &str, class: &str, config: &SeparableConfig) -> f64 {
    let mut p = 0.0;
    if FUNCTION_WORDS.contains(&word) {
        p += config.noise_rate / FUNCTION_WORDS.len() as f64;
    }
    if class_words(class, config).iter().any(|w| w == word) {
        p += (1.0 - config.noise_rate) / config.words_per_class as f64;
    }
    p
}

/// Labeled sentences drawn per class from [`separable_word_prob`]. Every
/// sentence carries at least one class word, so the classes are separable.
pub fn separable_dataset(config: &SeparableConfig) -> (LabeledDataset, LabelMap) {
    let labels = LabelMap::bundled(&config.label_map).expect("bundled label map");
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in labels.classes() {
        let vocab = class_words(&class, config);
        for i in 0..config.train_per_class + config.test_per_class {
            let n = rng.gen_range(config.min_words..=config.max_words);
            let mut words: Vec<&str> = (0..n)
                .map(|_| {
                    if rng.gen_bool(config.noise_rate) {
                        FUNCTION_WORDS[rng.gen_range(0..FUNCTION_WORDS.len())]
                    } else {
                        vocab[rng.gen_range(0..vocab.len())].as_str()
                    }
                })
                .collect();
            if words.iter().all(|w| FUNCTION_WORDS.contains(w)) {
                let at = rng.gen_range(0..words.len());
                words[at] = vocab[rng.gen_range(0..vocab.len())].as_str();
            }
            let (split, name) = if i < config.train_per_class { (&mut train, "train") } else { (&mut test, "test") };
            split.push(LabeledRecord::new(format!("{name}-{class}-{i}"), words.join(" "), class.clone()));
        }
    }
    let dataset = LabeledDataset::new(train, test).expect("generated ids are unique");
    (dataset, labels)
}
