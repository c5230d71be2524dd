use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{filter_instance, Corpus, CorpusError, Origin, ParallelInstance};

/// On-disk form of one instance: one JSON object per line.
#[derive(Debug, Serialize, Deserialize)]
struct CorpusRecord {
    text: String,
    emoji: String,
    topic: String,
    origin: Origin,
    id: String,
}

impl From<&ParallelInstance> for CorpusRecord {
    fn from(inst: &ParallelInstance) -> Self {
        Self {
            text: inst.text.clone(),
            emoji: inst.emoji_string(),
            topic: inst.topic.clone(),
            origin: inst.origin,
            id: inst.id.clone(),
        }
    }
}

/// Receives instances as they are accepted.
pub trait InstanceSink {
    fn append(&mut self, inst: &ParallelInstance) -> std::io::Result<()>;
}

impl InstanceSink for Vec<ParallelInstance> {
    fn append(&mut self, inst: &ParallelInstance) -> std::io::Result<()> {
        self.push(inst.clone());
        Ok(())
    }
}

/// Appends instances to a corpus file, one line each.
pub struct CorpusWriter<W: Write> {
    out: W,
}

impl CorpusWriter<BufWriter<File>> {
    pub fn create(path: &Path) -> Result<Self, CorpusError> {
        let file = File::create(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
        Ok(Self::new(BufWriter::new(file)))
    }
}

impl<W: Write> CorpusWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn flush(&mut self) -> std::io::Result<()> {
        self.out.flush()
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> InstanceSink for CorpusWriter<W> {
    fn append(&mut self, inst: &ParallelInstance) -> std::io::Result<()> {
        let line = serde_json::to_string(&CorpusRecord::from(inst))?;
        writeln!(self.out, "{line}")
    }
}

impl Corpus {
    /// Reads a corpus file, re-validating every record.
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
        Self::parse_lines(&text)
    }

    pub fn parse_lines(text: &str) -> Result<Self, CorpusError> {
        let mut instances = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = i + 1;
            let rec: CorpusRecord = serde_json::from_str(line)
                .map_err(|e| CorpusError::Malformed { line: line_no, message: e.to_string() })?;
            let mut inst = filter_instance(&rec.text, &rec.emoji, &rec.topic, rec.origin)
                .map_err(|reason| CorpusError::InvalidRecord { line: line_no, reason })?;
            if inst.emoji_string() != rec.emoji {
                return Err(CorpusError::Malformed {
                    line: line_no,
                    message: "emoji field contains non-emoji content".into(),
                });
            }
            inst.id = rec.id;
            instances.push(inst);
        }
        Ok(Self::new(instances))
    }

    pub fn save(&self, path: &Path) -> Result<(), CorpusError> {
        let mut w = CorpusWriter::create(path)?;
        self.write_to(&mut w).map_err(CorpusError::Write)?;
        w.flush().map_err(CorpusError::Write)
    }

    pub fn write_to<W: Write>(&self, w: &mut CorpusWriter<W>) -> std::io::Result<()> {
        for inst in &self.instances {
            w.append(inst)?;
        }
        Ok(())
    }

    /// Imports a CSV corpus with `text` and `emoji` columns (and an optional
    /// `topic` column), filtering every row. Returns the corpus and the
    /// number of rejected rows.
    pub fn import_csv(path: &Path) -> Result<(Self, usize), CorpusError> {
        let io_err = |e: csv::Error| CorpusError::Malformed { line: 0, message: e.to_string() };
        let mut reader = csv::Reader::from_path(path).map_err(io_err)?;
        let headers = reader.headers().map_err(io_err)?.clone();
        let col = |name: &str| headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name));
        let (Some(text_col), Some(emoji_col)) = (col("text"), col("emoji")) else {
            return Err(CorpusError::Malformed {
                line: 1,
                message: "CSV header must contain `text` and `emoji` columns".into(),
            });
        };
        let topic_col = col("topic");

        let mut instances = Vec::new();
        let mut rejected = 0;
        for (i, row) in reader.records().enumerate() {
            let row = row.map_err(|e| CorpusError::Malformed { line: i + 2, message: e.to_string() })?;
            let text = row.get(text_col).unwrap_or("");
            let emoji = row.get(emoji_col).unwrap_or("");
            let topic = topic_col.and_then(|c| row.get(c)).unwrap_or("");
            match filter_instance(text, emoji, topic, Origin::Imported) {
                Ok(inst) => instances.push(inst),
                Err(_) => rejected += 1,
            }
        }
        Ok((Self::new(instances), rejected))
    }

    /// Loads `.csv` files through [`Corpus::import_csv`] and anything else as
    /// a corpus file.
    pub fn load_any(path: &Path) -> Result<Self, CorpusError> {
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            Ok(Self::import_csv(path)?.0)
        } else {
            Self::load(path)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Rejection;

    #[test]
    fn round_trips_through_lines() {
        let corpus: Corpus = [
            filter_instance("I love my dog", "❤🐶", "animal", Origin::Startup).unwrap(),
            filter_instance("chef at work", "🧑\u{200d}🍳", "career", Origin::InstanceConditioned).unwrap(),
        ]
        .into_iter()
        .collect();
        let mut w = CorpusWriter::new(Vec::new());
        corpus.write_to(&mut w).unwrap();
        let text = String::from_utf8(w.into_inner()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with(r#"{"text":"I love my dog","emoji":"❤🐶","topic":"animal","origin":"startup","id":""#));
        assert_eq!(Corpus::parse_lines(&text).unwrap(), corpus);
    }

    #[test]
    fn rejects_invalid_records_on_load() {
        let no_emoji = r#"{"text":"hi","emoji":"abc","topic":"t","origin":"startup","id":"x"}"#;
        assert!(matches!(
            Corpus::parse_lines(no_emoji),
            Err(CorpusError::InvalidRecord { line: 1, reason: Rejection::NoEmoji })
        ));
        let mixed = r#"{"text":"hi","emoji":"🐶 dog","topic":"t","origin":"startup","id":"x"}"#;
        assert!(matches!(Corpus::parse_lines(mixed), Err(CorpusError::Malformed { line: 1, .. })));
        assert!(matches!(Corpus::parse_lines("{"), Err(CorpusError::Malformed { .. })));
    }
}
