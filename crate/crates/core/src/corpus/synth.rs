use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    parse_completion, render_conditioned_prompt, render_startup_prompt, CompletionRequest, Corpus, CorpusError,
    InstanceSink, LlmProvider, Origin, ParallelInstance, DEFAULT_TOPICS,
};

/// Parameters of a two-phase synthesis run.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisConfig {
    pub topics: Vec<String>,
    /// Startup prompts issued per topic in phase one.
    pub startup_queries_per_topic: usize,
    /// Exemplar-conditioned prompts issued in phase two.
    pub conditioned_queries: usize,
    pub temperature: f64,
    /// Seeds the exemplar draw of phase two.
    pub seed: u64,
    /// Upper bound on concurrent provider requests.
    pub max_in_flight: usize,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            topics: DEFAULT_TOPICS.iter().map(|t| t.to_string()).collect(),
            startup_queries_per_topic: 1000,
            conditioned_queries: 15000,
            temperature: 1.5,
            seed: 0,
            max_in_flight: 8,
        }
    }
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<(), CorpusError> {
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(CorpusError::InvalidConfig(format!("temperature must be > 0, got {}", self.temperature)));
        }
        if self.topics.iter().any(|t| t.trim().is_empty()) {
            return Err(CorpusError::EmptyTopic);
        }
        Ok(())
    }
}

/// Counters from a synthesis run, plus the deduplicated corpus.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SynthesisReport {
    pub corpus: Corpus,
    pub startup_queries: usize,
    pub conditioned_queries: usize,
    pub rejected: usize,
    pub unparseable: usize,
    pub duplicates: usize,
}

struct Query {
    prompt: String,
    topic: String,
    origin: Origin,
    seed: u64,
}

/// Runs both synthesis phases against `provider`, streaming accepted
/// instances into `sink` in a deterministic order.
///
/// Phase one issues every startup prompt; request `j` for a topic carries
/// seed `j`. Phase two draws `conditioned_queries` exemplars uniformly from
/// the phase-one pool with a generator seeded by `config.seed` and issues the
/// conditioned prompt for each, with the query ordinal as seed. Pairs that
/// repeat an earlier (text, emoji) are dropped.
///
/// A provider failure stops the run after everything before the failing
/// request has been written to `sink`.
pub fn synthesize<P, S>(config: &SynthesisConfig, provider: &P, sink: &mut S) -> Result<SynthesisReport, CorpusError>
where
    P: LlmProvider + ?Sized,
    S: InstanceSink + ?Sized,
{
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.max_in_flight.max(1))
        .build()
        .map_err(|e| CorpusError::InvalidConfig(e.to_string()))?;

    let mut run = Run { config, provider, sink, pool: &pool, seen: HashSet::new(), report: SynthesisReport::default() };

    let mut startup = Vec::new();
    for topic in &config.topics {
        let prompt = render_startup_prompt(topic)?;
        for j in 0..config.startup_queries_per_topic {
            startup.push(Query {
                prompt: prompt.clone(),
                topic: topic.clone(),
                origin: Origin::Startup,
                seed: j as u64,
            });
        }
    }
    run.report.startup_queries = startup.len();
    run.execute(startup)?;

    let exemplars: Vec<ParallelInstance> = run.report.corpus.instances().to_vec();
    if config.conditioned_queries > 0 && !exemplars.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut conditioned = Vec::with_capacity(config.conditioned_queries);
        for q in 0..config.conditioned_queries {
            let ex = &exemplars[rng.gen_range(0..exemplars.len())];
            conditioned.push(Query {
                prompt: render_conditioned_prompt(ex.topic(), ex)?,
                topic: ex.topic().to_string(),
                origin: Origin::InstanceConditioned,
                seed: q as u64,
            });
        }
        run.report.conditioned_queries = conditioned.len();
        run.execute(conditioned)?;
    }
    Ok(run.report)
}

struct Run<'a, P: ?Sized, S: ?Sized> {
    config: &'a SynthesisConfig,
    provider: &'a P,
    sink: &'a mut S,
    pool: &'a rayon::ThreadPool,
    seen: HashSet<(String, String)>,
    report: SynthesisReport,
}

impl<P: LlmProvider + ?Sized, S: InstanceSink + ?Sized> Run<'_, P, S> {
    fn execute(&mut self, queries: Vec<Query>) -> Result<(), CorpusError> {
        let batch = self.config.max_in_flight.max(1);
        for chunk in queries.chunks(batch) {
            let (provider, temperature) = (self.provider, self.config.temperature);
            let completions: Vec<_> = self.pool.install(|| {
                chunk
                    .par_iter()
                    .map(|q| {
                        provider.complete(&CompletionRequest { prompt: &q.prompt, temperature, seed: Some(q.seed) })
                    })
                    .collect()
            });
            for (q, completion) in chunk.iter().zip(completions) {
                let raw = match completion {
                    Ok(raw) => raw,
                    Err(source) => {
                        return Err(CorpusError::Provider { prompt: q.prompt.clone(), source });
                    }
                };
                self.accept(&raw, q)?;
            }
        }
        Ok(())
    }

    fn accept(&mut self, raw: &str, q: &Query) -> Result<(), CorpusError> {
        let parsed = parse_completion(raw, &q.topic, q.origin);
        self.report.rejected += parsed.rejected;
        self.report.unparseable += parsed.unparseable;
        for inst in parsed.instances {
            if !self.seen.insert(inst.dedup_key()) {
                self.report.duplicates += 1;
                continue;
            }
            self.sink.append(&inst).map_err(CorpusError::Write)?;
            self.report.corpus.push(inst);
        }
        Ok(())
    }
}
