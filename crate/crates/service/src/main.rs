use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use emotrans_core::corpus::{
    compute_stats, split, synthesize, Corpus, CorpusWriter, ReplayProvider, SplitAssignment, SynthesisConfig,
    DEFAULT_TOPICS,
};
use emotrans_core::emoji::emoji_tokens;
use emotrans_core::evaluation::{
    aggregate_preferences, bleu_with, build_preference_tasks, read_jsonl, write_jsonl, Judgment, PreferenceItem,
    PreferenceTask, Smoothing,
};
use emotrans_core::text::words;
use emotrans_core::transfer::{run_experiment, LabelMap, LabeledDataset, TransferMode};
use emotrans_core::translator::{DecodeConfig, Direction, TrainOptions, TranslationModel};
use emotrans_service::{router, AppState, Models};
use serde_json::json;

/// Bidirectional English/emoji translation toolkit.
#[derive(Parser)]
#[command(name = "emotrans", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a parallel corpus from provider completions
    Synthesize(SynthesizeArgs),
    /// Corpus statistics as JSON
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
    },
    /// Seeded 8/1/1 train/dev/test split
    Split {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory receiving train.jsonl, dev.jsonl, test.jsonl and split.json
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train a translation model for one direction
    Train(TrainArgs),
    /// Translate stdin line by line
    Translate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Scoring and human-evaluation tools
    #[command(subcommand)]
    Evaluate(EvaluateCommand),
    /// Classification through label emojis
    Transfer(TransferArgs),
    /// Serve the HTTP API
    Serve(ServeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ProviderKind {
    Replay,
    Live,
}

#[derive(clap::Args)]
struct SynthesizeArgs {
    #[arg(long, value_enum, default_value = "replay")]
    provider: ProviderKind,
    /// JSON-lines transcript file for the replay provider
    #[arg(long)]
    transcripts: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated topics; the built-in list by default
    #[arg(long, value_delimiter = ',')]
    topics: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    startup_queries: usize,
    #[arg(long, default_value_t = 15000)]
    conditioned_queries: usize,
    #[arg(long, default_value_t = 1.5)]
    temperature: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    max_in_flight: usize,
}

#[derive(clap::Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    direction: Direction,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    lm_alpha: f64,
    #[arg(long, default_value_t = 4)]
    beam_size: usize,
    #[arg(long, default_value_t = 0.3)]
    lm_weight: f64,
    #[arg(long, default_value_t = 0.2)]
    lexical_threshold: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tokenizer {
    /// Emoji tokens, composed sequences kept whole
    Emoji,
    /// Lowercased words
    Words,
}

#[derive(Clone, Copy, ValueEnum)]
enum SmoothingArg {
    None,
    AddOne,
}

#[derive(Subcommand)]
enum EvaluateCommand {
    /// Corpus BLEU of line-aligned hypothesis and reference files
    Bleu {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long, value_enum, default_value = "emoji")]
        tokenizer: Tokenizer,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, value_enum, default_value = "none")]
        smoothing: SmoothingArg,
    },
    /// Blinded A/B tasks from preference items
    BuildTasks {
        #[arg(long)]
        items: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Majority aggregation of judgments
    Prefs {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        judgments: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Fewshot,
}

#[derive(clap::Args)]
struct TransferArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// Label-map file, or the name of a bundled map
    #[arg(long)]
    labels: String,
    #[arg(long, value_enum, default_value = "fewshot")]
    mode: ModeArg,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
}

#[derive(clap::Args)]
struct ServeArgs {
    /// The PORT environment variable replaces the port
    #[arg(long, default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    #[arg(long)]
    t2e_model: PathBuf,
    #[arg(long)]
    e2t_model: PathBuf,
    /// Extra label-map files, served under their file stem
    #[arg(long)]
    labelmap: Vec<PathBuf>,
    /// Corpus summarized by /api/health
    #[arg(long)]
    corpus: Option<PathBuf>,
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run_synthesize(args: SynthesizeArgs) -> Result<()> {
    let provider = match args.provider {
        ProviderKind::Live => {
            bail!("live provider is not available in this build; record transcripts and use --provider replay")
        }
        ProviderKind::Replay => {
            let path = args.transcripts.context("--transcripts is required with the replay provider")?;
            ReplayProvider::load(&path)?
        }
    };
    let topics = if args.topics.is_empty() { DEFAULT_TOPICS.map(String::from).to_vec() } else { args.topics };
    let config = SynthesisConfig {
        topics,
        startup_queries_per_topic: args.startup_queries,
        conditioned_queries: args.conditioned_queries,
        temperature: args.temperature,
        seed: args.seed,
        max_in_flight: args.max_in_flight,
    };
    let mut writer = CorpusWriter::create(&args.out)?;
    let result = synthesize(&config, &provider, &mut writer);
    writer.flush().with_context(|| format!("writing {}", args.out.display()))?;
    let report = result?;
    print_json(&json!({
        "instances": report.corpus.len(),
        "startup_queries": report.startup_queries,
        "conditioned_queries": report.conditioned_queries,
        "rejected": report.rejected,
        "unparseable": report.unparseable,
        "duplicates": report.duplicates,
    }))
}

fn run_split(corpus: &Path, seed: u64, out_dir: &Path) -> Result<()> {
    let corpus = Corpus::load_any(corpus)?;
    let assignment: SplitAssignment = split(&corpus, seed)?;
    std::fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let (train, dev, test) = assignment.apply(&corpus);
    for (name, part) in [("train", &train), ("dev", &dev), ("test", &test)] {
        part.save(&out_dir.join(format!("{name}.jsonl")))?;
    }
    std::fs::write(out_dir.join("split.json"), serde_json::to_string(&assignment)?)?;
    print_json(&json!({ "train": train.len(), "dev": dev.len(), "test": test.len() }))
}

fn run_train(args: TrainArgs) -> Result<()> {
    let corpus = Corpus::load_any(&args.corpus)?;
    let options = TrainOptions {
        iterations: args.iterations,
        seed: args.seed,
        lm_alpha: args.lm_alpha,
        decode: DecodeConfig {
            beam_size: args.beam_size,
            lm_weight: args.lm_weight,
            lexical_threshold: args.lexical_threshold,
            ..DecodeConfig::default()
        },
        ..TrainOptions::default()
    };
    let (model, trace) = TranslationModel::train(&corpus, args.direction, &options)?;
    model.save(&args.out)?;
    print_json(&json!({
        "model_id": model.model_id(),
        "direction": args.direction,
        "instances": corpus.len(),
        "log_likelihoods": trace.log_likelihoods,
    }))
}

fn run_translate(model: &Path) -> Result<()> {
    let model = TranslationModel::load(model)?;
    let stdin = std::io::stdin();
    let mut out = std::io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line.context("reading stdin")?;
        writeln!(out, "{}", model.translate(&line)?.output)?;
    }
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn run_evaluate(cmd: EvaluateCommand) -> Result<()> {
    match cmd {
        EvaluateCommand::Bleu { hyp, reference, tokenizer, max_n, smoothing } => {
            let tokenize = |line: &String| match tokenizer {
                Tokenizer::Emoji => emoji_tokens(line).into_iter().map(|t| t.into_string()).collect::<Vec<_>>(),
                Tokenizer::Words => words(line),
            };
            let hyps: Vec<Vec<String>> = read_lines(&hyp)?.iter().map(tokenize).collect();
            let refs: Vec<Vec<String>> = read_lines(&reference)?.iter().map(tokenize).collect();
            let smoothing = match smoothing {
                SmoothingArg::None => Smoothing::None,
                SmoothingArg::AddOne => Smoothing::AddOne,
            };
            let report = bleu_with(&hyps, &refs, max_n, smoothing)?;
            print_json(&serde_json::to_value(&report)?)
        }
        EvaluateCommand::BuildTasks { items, seed, out } => {
            let items: Vec<PreferenceItem> = read_jsonl(&items)?;
            let tasks = build_preference_tasks(&items, seed);
            write_jsonl(&out, &tasks)?;
            print_json(&json!({ "tasks": tasks.len() }))
        }
        EvaluateCommand::Prefs { tasks, judgments } => {
            let tasks: Vec<PreferenceTask> = read_jsonl(&tasks)?;
            let judgments: Vec<Judgment> = read_jsonl(&judgments)?;
            print_json(&serde_json::to_value(aggregate_preferences(&tasks, &judgments)?)?)
        }
    }
}

fn run_transfer(args: TransferArgs) -> Result<()> {
    let labels = if Path::new(&args.labels).exists() {
        LabelMap::load(Path::new(&args.labels))?
    } else {
        LabelMap::bundled(&args.labels)?
    };
    let dataset = LabeledDataset::load(&args.train, &args.test)?;
    let mode = match args.mode {
        ModeArg::Full => TransferMode::Full,
        ModeArg::Fewshot => TransferMode::FewShot { k: args.k },
    };
    let report = run_experiment(&dataset, &labels, mode, args.runs, args.seed, args.alpha)?;
    print_json(&serde_json::to_value(&report)?)
}

fn bind_address(mut bind: SocketAddr, port: Option<String>) -> Result<SocketAddr> {
    if let Some(port) = port {
        bind.set_port(port.parse().with_context(|| format!("PORT={port:?} is not a port number"))?);
    }
    Ok(bind)
}

fn run_serve(args: ServeArgs) -> Result<()> {
    let addr = bind_address(args.bind, std::env::var("PORT").ok())?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.with_context(|| format!("binding {addr}"))?;
        eprintln!("listening on {}", listener.local_addr()?);
        let state = AppState::loading();
        let loader_state = state.clone();
        tokio::task::spawn_blocking(move || {
            match Models::load(&args.t2e_model, &args.e2t_model, &args.labelmap, args.corpus.as_deref()) {
                Ok(models) => {
                    loader_state.install(models);
                    eprintln!("models ready");
                }
                Err(e) => {
                    eprintln!("error: {}", diagnostic(&e.into()));
                    std::process::exit(1);
                }
            }
        });
        axum::serve(listener, router(state)).await.context("server stopped")
    })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synthesize(args) => run_synthesize(args),
        Command::Stats { corpus, top_k } => {
            let stats = compute_stats(&Corpus::load_any(&corpus)?, top_k)?;
            print_json(&serde_json::to_value(&stats)?)
        }
        Command::Split { corpus, seed, out_dir } => run_split(&corpus, seed, &out_dir),
        Command::Train(args) => run_train(args),
        Command::Translate { model } => run_translate(&model),
        Command::Evaluate(cmd) => run_evaluate(cmd),
        Command::Transfer(args) => run_transfer(args),
        Command::Serve(args) => run_serve(args),
    }
}

/// `FileNotFound` for missing inputs, otherwise the error chain.
fn diagnostic(err: &anyhow::Error) -> String {
    let missing = err
        .chain()
        .filter_map(|e| e.downcast_ref::<std::io::Error>())
        .any(|e| e.kind() == std::io::ErrorKind::NotFound);
    let chain = err.chain().map(ToString::to_string).collect::<Vec<_>>().join(": ");
    if missing {
        format!("FileNotFound: {chain}")
    } else {
        chain
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", diagnostic(&e));
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn port_override() {
        let bind: SocketAddr = "127.0.0.1:8080".parse().unwrap();
        assert_eq!(bind_address(bind, None).unwrap().port(), 8080);
        assert_eq!(bind_address(bind, Some("9001".into())).unwrap().port(), 9001);
        assert!(bind_address(bind, Some("http".into())).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
