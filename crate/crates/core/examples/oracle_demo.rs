//! Trains both directions on the synthetic oracle corpus and prints test BLEU.

use emotrans_core::corpus::split;
use emotrans_core::evaluation::bleu;
use emotrans_core::synthetic::{oracle_corpus, OracleConfig};
use emotrans_core::translator::{Direction, TrainOptions, TranslationModel};

fn main() {
    let corpus = oracle_corpus(&OracleConfig::default());
    let (train, _dev, test) = split(&corpus, 0).expect("500 instances").apply(&corpus);
    let options = TrainOptions { iterations: 20, ..TrainOptions::default() };
    for direction in [Direction::TextToEmoji, Direction::EmojiToText] {
        let (model, trace) = TranslationModel::train(&train, direction, &options).expect("training");
        let mut hyps = Vec::new();
        let mut refs = Vec::new();
        for inst in &test {
            let (source, _) = direction.sides(inst);
            let hyp = model.translate_tokens(direction, &source).expect("decode");
            let (_, tokens) = direction.render(&hyp.tokens);
            let (_, reference) = direction.render(&direction.sides(inst).1);
            hyps.push(tokens);
            refs.push(reference);
        }
        let report = bleu(&hyps, &refs, 4).expect("bleu");
        println!(
            "{direction}: b1={:.4} b2={:.4} bp={:.4} ll={:.2}",
            report.scores[0],
            report.scores[1],
            report.brevity_penalty,
            trace.final_log_likelihood().unwrap()
        );
    }
}
