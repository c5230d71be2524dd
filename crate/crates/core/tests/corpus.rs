use std::path::PathBuf;

use emotrans_core::corpus::{
    compute_stats, prompt_hash, render_conditioned_prompt, split, synthesize, Corpus, CorpusWriter, Origin,
    ReplayProvider, SynthesisConfig, TranscriptRecord,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn config(max_in_flight: usize) -> SynthesisConfig {
    SynthesisConfig {
        topics: vec!["animal".into(), "food".into()],
        startup_queries_per_topic: 3,
        conditioned_queries: 4,
        temperature: 1.5,
        seed: 11,
        max_in_flight,
    }
}

/// Startup transcripts from the fixture plus one conditioned completion,
/// shared by every exemplar of the startup pool.
fn provider() -> ReplayProvider {
    let startup = ReplayProvider::load(&fixture("replay_startup.jsonl")).unwrap();
    let cfg = SynthesisConfig { conditioned_queries: 0, ..config(1) };
    let pool = synthesize(&cfg, &startup, &mut Vec::new()).unwrap().corpus;
    let mut records: Vec<TranscriptRecord> = std::fs::read_to_string(fixture("replay_startup.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    for ex in &pool {
        records.push(TranscriptRecord {
            prompt_hash: prompt_hash(&render_conditioned_prompt(ex.topic(), ex).unwrap()),
            completion: "Text: A new day. Emoji Translation: 🌞".into(),
        });
    }
    ReplayProvider::new(records)
}

fn synthesize_bytes(max_in_flight: usize) -> Vec<u8> {
    let mut w = CorpusWriter::new(Vec::new());
    synthesize(&config(max_in_flight), &provider(), &mut w).unwrap();
    w.into_inner()
}

#[test]
fn replay_counts_match_hand_audit() {
    let report = synthesize(&config(2), &provider(), &mut Vec::new()).unwrap();
    assert_eq!(report.startup_queries, 6);
    assert_eq!(report.conditioned_queries, 4);
    assert_eq!(report.rejected, 1);
    assert_eq!(report.unparseable, 1);
    // animal: 2 repeats of its first record; food: 2 repeats plus the cat pair; phase two: 3 repeats
    assert_eq!(report.duplicates, 8);
    let texts: Vec<&str> = report.corpus.iter().map(|i| i.text()).collect();
    assert_eq!(
        texts,
        [
            "The dog runs fast.",
            "A cat sleeps.",
            "The snake hides.",
            "I love pizza.",
            "The chef cooks.",
            "Coffee in the morning.",
            "A new day."
        ]
    );
    let last = &report.corpus.instances()[6];
    assert_eq!(last.origin(), Origin::InstanceConditioned);
    assert_eq!(report.corpus.instances()[3].emoji_string(), "❤\u{fe0f}🍕");

    let stats = compute_stats(&report.corpus, 3).unwrap();
    assert_eq!(stats.instance_count, 7);
    assert_eq!(stats.emoji_vocab_size, 14);
    assert!((stats.avg_text_length - 23.0 / 7.0).abs() < 1e-12);
    assert_eq!(stats.avg_emoji_length, 2.0);
    // the composed chef emoji is one token
    assert!(report.corpus.instances()[4].emoji().iter().any(|t| t.as_str() == "🧑\u{200d}🍳"));
}

#[test]
fn corpus_bytes_are_deterministic() {
    let a = synthesize_bytes(1);
    assert!(!a.is_empty());
    assert_eq!(a, synthesize_bytes(1));
    assert_eq!(a, synthesize_bytes(8));
}

#[test]
fn file_round_trip_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.jsonl");
    std::fs::write(&path, synthesize_bytes(3)).unwrap();
    let corpus = Corpus::load(&path).unwrap();
    assert_eq!(corpus.len(), 7);
    let again = dir.path().join("again.jsonl");
    corpus.save(&again).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
    assert!(split(&corpus, 0).is_err());
}

#[test]
fn missing_transcript_stops_the_run() {
    let cfg = SynthesisConfig { topics: vec!["weather".into()], ..config(1) };
    let startup = ReplayProvider::load(&fixture("replay_startup.jsonl")).unwrap();
    let mut sink = Vec::new();
    assert!(synthesize(&cfg, &startup, &mut sink).is_err());
    assert!(sink.is_empty());
}
