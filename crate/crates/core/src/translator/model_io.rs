//! Binary model file.
//!
//! Layout, little-endian: magic, format version (u16), direction (u8),
//! decode config, training summary, source and target vocabularies, sparse
//! lexicon triples, fertility rows, LM counts, then a CRC-32 of every
//! preceding byte. Floats are stored as raw bits so a round trip is exact.

use std::collections::HashMap;
use std::path::Path;

use super::{
    DecodeConfig, Direction, FertilityTable, Lexicon, NgramLM, TrainingSummary, TranslationModel, TranslatorError,
    MAX_FERTILITY, NULL_TOKEN,
};

pub const MAGIC: &[u8; 4] = b"EMTM";
pub const FORMAT_VERSION: u16 = 1;

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn u16(&mut self, v: u16) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn len(&mut self, n: usize) {
        self.u32(u32::try_from(n).expect("table fits in u32"));
    }
    fn str(&mut self, s: &str) {
        self.len(s.len());
        self.buf.extend_from_slice(s.as_bytes());
    }
    fn strings(&mut self, v: &[String]) {
        self.len(v.len());
        for s in v {
            self.str(s);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn corrupt(msg: impl Into<String>) -> TranslatorError {
    TranslatorError::CorruptFile(msg.into())
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], TranslatorError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len()).ok_or_else(|| corrupt("truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, TranslatorError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, TranslatorError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, TranslatorError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, TranslatorError> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn len(&mut self) -> Result<usize, TranslatorError> {
        let n = self.u32()? as usize;
        // Every element takes at least one byte, which bounds allocations.
        if n > self.buf.len() - self.pos {
            return Err(corrupt("length exceeds file size"));
        }
        Ok(n)
    }
    fn str(&mut self) -> Result<String, TranslatorError> {
        let n = self.len()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| corrupt("invalid UTF-8 in vocabulary"))
    }
    fn strings(&mut self) -> Result<Vec<String>, TranslatorError> {
        (0..self.len()?).map(|_| self.str()).collect()
    }
}

fn direction_tag(d: Direction) -> u8 {
    match d {
        Direction::TextToEmoji => 0,
        Direction::EmojiToText => 1,
    }
}

impl TranslationModel {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.buf.extend_from_slice(MAGIC);
        w.u16(FORMAT_VERSION);
        w.u8(direction_tag(self.direction()));

        let c = &self.config;
        w.u32(c.beam_size as u32);
        w.u32(c.max_length as u32);
        w.f64(c.lexical_threshold);
        w.f64(c.lm_weight);
        w.u64(self.summary.instances);
        w.u32(self.summary.iterations);
        w.u64(self.summary.seed);

        let lex = &self.lexicon;
        w.strings(&lex.source_vocab);
        w.strings(&lex.target_vocab);
        w.u64(lex.nnz() as u64);
        for (s, row) in lex.rows.iter().enumerate() {
            for &(t, p) in row {
                w.u32(s as u32);
                w.u32(t);
                w.f64(p);
            }
        }

        let fert: Vec<(usize, &Vec<f64>)> =
            self.fertility.rows.iter().enumerate().filter(|(_, r)| !r.is_empty()).collect();
        w.len(fert.len());
        for (s, row) in fert {
            w.u32(s as u32);
            for &p in row {
                w.f64(p);
            }
        }

        let lm = &self.lm;
        w.u8(lm.order);
        w.f64(lm.alpha);
        w.strings(&lm.vocab);
        for &c in &lm.unigram {
            w.u64(c);
        }
        w.u64(lm.total);
        let mut bigrams: Vec<(&(u32, u32), &u64)> = lm.bigram.iter().collect();
        bigrams.sort_unstable();
        w.len(bigrams.len());
        for (&(a, b), &c) in bigrams {
            w.u32(a);
            w.u32(b);
            w.u64(c);
        }
        for &c in &lm.context {
            w.u64(c);
        }

        let crc = crc32fast::hash(&w.buf);
        w.u32(crc);
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, TranslatorError> {
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(corrupt("bad magic"));
        }
        if bytes.len() < 6 {
            return Err(corrupt("truncated"));
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != FORMAT_VERSION {
            return Err(TranslatorError::VersionMismatch { found: version, supported: FORMAT_VERSION });
        }
        if bytes.len() < 10 {
            return Err(corrupt("truncated"));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 4);
        if crc32fast::hash(body) != u32::from_le_bytes(tail.try_into().unwrap()) {
            return Err(corrupt("checksum mismatch"));
        }
        let mut r = Reader { buf: body, pos: 6 };
        let direction = match r.u8()? {
            0 => Direction::TextToEmoji,
            1 => Direction::EmojiToText,
            other => return Err(corrupt(format!("unknown direction tag {other}"))),
        };
        let config = DecodeConfig {
            beam_size: r.u32()? as usize,
            max_length: r.u32()? as usize,
            lexical_threshold: r.f64()?,
            lm_weight: r.f64()?,
        };
        config.validate().map_err(|e| corrupt(e.to_string()))?;
        let summary = TrainingSummary { instances: r.u64()?, iterations: r.u32()?, seed: r.u64()? };

        let source_vocab = r.strings()?;
        let target_vocab = r.strings()?;
        if source_vocab.first().map(String::as_str) != Some(NULL_TOKEN) {
            return Err(corrupt("source vocabulary must start with the NULL token"));
        }
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); source_vocab.len()];
        let nnz = r.u64()?;
        for _ in 0..nnz {
            let (s, t, p) = (r.u32()? as usize, r.u32()?, r.f64()?);
            if s >= rows.len() || t as usize >= target_vocab.len() || !(0.0..=1.0).contains(&p) {
                return Err(corrupt("lexicon entry out of range"));
            }
            if rows[s].last().is_some_and(|&(prev, _)| prev >= t) {
                return Err(corrupt("lexicon row not sorted"));
            }
            rows[s].push((t, p));
        }
        let index = |v: &[String]| v.iter().enumerate().map(|(i, s)| (s.clone(), i as u32)).collect();
        let lexicon = Lexicon {
            direction,
            source_index: index(&source_vocab),
            target_index: index(&target_vocab),
            source_vocab,
            target_vocab,
            rows,
        };

        let mut fert_rows = vec![Vec::new(); lexicon.source_vocab.len()];
        for _ in 0..r.len()? {
            let s = r.u32()? as usize;
            let row = (0..=MAX_FERTILITY).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
            *fert_rows.get_mut(s).ok_or_else(|| corrupt("fertility row out of range"))? = row;
        }
        let fertility = FertilityTable { rows: fert_rows };

        let order = r.u8()?;
        let alpha = r.f64()?;
        let vocab = r.strings()?;
        let unigram = (0..vocab.len()).map(|_| r.u64()).collect::<Result<Vec<_>, _>>()?;
        let total = r.u64()?;
        let mut bigram = HashMap::new();
        for _ in 0..r.len()? {
            bigram.insert((r.u32()?, r.u32()?), r.u64()?);
        }
        let context = (0..=vocab.len()).map(|_| r.u64()).collect::<Result<Vec<_>, _>>()?;
        if !(order == 1 || order == 2) || alpha.is_nan() || alpha <= 0.0 {
            return Err(corrupt("invalid LM parameters"));
        }
        let lm = NgramLM { order, alpha, index: index(&vocab), vocab, unigram, total, bigram, context };
        if r.pos != body.len() {
            return Err(corrupt("trailing bytes"));
        }
        Ok(Self { lexicon, fertility, lm, config, summary })
    }

    pub fn save(&self, path: &Path) -> Result<(), TranslatorError> {
        std::fs::write(path, self.to_bytes()).map_err(|source| TranslatorError::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<Self, TranslatorError> {
        let bytes = std::fs::read(path).map_err(|source| TranslatorError::Io { path: path.to_path_buf(), source })?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{filter_instance, Corpus, Origin};
    use crate::translator::TrainOptions;

    fn model() -> TranslationModel {
        let c: Corpus = [("my dog", "🐶"), ("a cat", "🐱"), ("dog and cat", "🐶🐱"), ("the chef", "🧑\u{200d}🍳")]
            .iter()
            .map(|(t, e)| filter_instance(t, e, "t", Origin::Startup).unwrap())
            .collect();
        TranslationModel::train(&c, Direction::TextToEmoji, &TrainOptions::default()).unwrap().0
    }

    #[test]
    fn round_trip_is_exact() {
        let m = model();
        let bytes = m.to_bytes();
        let back = TranslationModel::from_bytes(&bytes).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_bytes(), bytes);
        for input in ["my dog", "cat", "the chef and the dog", "nothing here"] {
            assert_eq!(back.translate(input).unwrap(), m.translate(input).unwrap());
        }
    }

    #[test]
    fn truncation_and_corruption_are_detected() {
        let bytes = model().to_bytes();
        for cut in [0, 3, 5, 9, bytes.len() / 2, bytes.len() - 1] {
            assert!(
                matches!(TranslationModel::from_bytes(&bytes[..cut]), Err(TranslatorError::CorruptFile(_))),
                "cut {cut}"
            );
        }
        let mut flipped = bytes.clone();
        flipped[20] ^= 0x40;
        assert!(matches!(TranslationModel::from_bytes(&flipped), Err(TranslatorError::CorruptFile(_))));
    }

    #[test]
    fn future_version_is_rejected() {
        let mut bytes = model().to_bytes();
        bytes[4..6].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
        assert!(matches!(
            TranslationModel::from_bytes(&bytes),
            Err(TranslatorError::VersionMismatch { found: 2, supported: 1 })
        ));
    }
}
