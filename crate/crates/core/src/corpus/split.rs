use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusError};

/// Disjoint train/dev/test id sets covering a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub train: Vec<String>,
    pub dev: Vec<String>,
    pub test: Vec<String>,
}

impl SplitAssignment {
    /// The three sub-corpora, each in original corpus order.
    pub fn apply(&self, corpus: &Corpus) -> (Corpus, Corpus, Corpus) {
        let pick = |ids: &[String]| {
            let set: HashSet<&str> = ids.iter().map(String::as_str).collect();
            corpus.iter().filter(|i| set.contains(i.id())).cloned().collect::<Corpus>()
        };
        (pick(&self.train), pick(&self.dev), pick(&self.test))
    }
}

/// Seeded shuffle followed by a contiguous 8/1/1 partition.
pub fn split(corpus: &Corpus, seed: u64) -> Result<SplitAssignment, CorpusError> {
    let n = corpus.len();
    if n < 10 {
        return Err(CorpusError::TooSmall(n));
    }
    let mut ids: Vec<String> = corpus.iter().map(|i| i.id().to_string()).collect();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let tenth = (n as f64 / 10.0).round() as usize;
    let test = ids.split_off(n - tenth);
    let dev = ids.split_off(n - 2 * tenth);
    Ok(SplitAssignment { train: ids, dev, test })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{filter_instance, Origin};

    fn corpus(n: usize) -> Corpus {
        (0..n).map(|i| filter_instance(&format!("text {i}"), "🐶", "t", Origin::Startup).unwrap()).collect()
    }

    #[test]
    fn ratios() {
        let s = split(&corpus(100), 1).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (80, 10, 10));
        let s = split(&corpus(10), 1).unwrap();
        assert_eq!((s.train.len(), s.dev.len(), s.test.len()), (8, 1, 1));
        assert!(matches!(split(&corpus(9), 1), Err(CorpusError::TooSmall(9))));
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let c = corpus(50);
        assert_eq!(split(&c, 3).unwrap(), split(&c, 3).unwrap());
        assert_ne!(split(&c, 3).unwrap(), split(&c, 4).unwrap());
    }

    #[test]
    fn apply_preserves_order() {
        let c = corpus(20);
        let (train, dev, test) = split(&c, 9).unwrap().apply(&c);
        assert_eq!(train.len() + dev.len() + test.len(), 20);
        let pos = |id: &str| c.iter().position(|i| i.id() == id).unwrap();
        let p: Vec<usize> = train.iter().map(|i| pos(i.id())).collect();
        assert!(p.windows(2).all(|w| w[0] < w[1]));
    }
}
