use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvaluationError;

/// One input with the system's candidate and a competing candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceItem {
    pub item_id: String,
    pub input: String,
    pub system: String,
    pub other: String,
}

impl PreferenceItem {
    pub fn new(
        item_id: impl Into<String>,
        input: impl Into<String>,
        system: impl Into<String>,
        other: impl Into<String>,
    ) -> Self {
        Self { item_id: item_id.into(), input: input.into(), system: system.into(), other: other.into() }
    }
}

/// A blinded A/B question. `a_is_system` records which slot holds the
/// system candidate so aggregation can unblind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceTask {
    pub item_id: String,
    pub input_shown: String,
    pub option_a: String,
    pub option_b: String,
    pub a_is_system: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Choice {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub item_id: String,
    pub evaluator_id: String,
    pub choice: Choice,
}

/// Majority outcome for one item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ItemOutcome {
    pub item_id: String,
    pub votes_a: usize,
    pub votes_b: usize,
    pub system_won: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreferenceSummary {
    pub items: Vec<ItemOutcome>,
    /// Fraction of items whose majority chose the system candidate.
    pub system_rate: f64,
}

/// Places each item's system candidate in slot A or B by an independent
/// fair coin from a generator seeded with `seed`.
pub fn build_preference_tasks(items: &[PreferenceItem], seed: u64) -> Vec<PreferenceTask> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    items
        .iter()
        .map(|item| {
            let a_is_system = rng.gen_bool(0.5);
            let (a, b) = if a_is_system { (&item.system, &item.other) } else { (&item.other, &item.system) };
            PreferenceTask {
                item_id: item.item_id.clone(),
                input_shown: item.input.clone(),
                option_a: a.clone(),
                option_b: b.clone(),
                a_is_system,
            }
        })
        .collect()
}

/// Majority vote per task, unblinded through `a_is_system`. Outcomes follow
/// task order.
pub fn aggregate_preferences(
    tasks: &[PreferenceTask],
    judgments: &[Judgment],
) -> Result<PreferenceSummary, EvaluationError> {
    if tasks.is_empty() {
        return Err(EvaluationError::EmptyInput);
    }
    let mut votes: HashMap<&str, (usize, usize)> = tasks.iter().map(|t| (t.item_id.as_str(), (0, 0))).collect();
    let mut seen = HashSet::new();
    for j in judgments {
        let v = votes.get_mut(j.item_id.as_str()).ok_or_else(|| EvaluationError::UnknownItem(j.item_id.clone()))?;
        if !seen.insert((j.item_id.as_str(), j.evaluator_id.as_str())) {
            return Err(EvaluationError::DuplicateJudgment {
                item_id: j.item_id.clone(),
                evaluator_id: j.evaluator_id.clone(),
            });
        }
        match j.choice {
            Choice::A => v.0 += 1,
            Choice::B => v.1 += 1,
        }
    }
    let mut items = Vec::with_capacity(tasks.len());
    for t in tasks {
        let (a, b) = votes[t.item_id.as_str()];
        match a + b {
            0 => return Err(EvaluationError::MissingJudgments(t.item_id.clone())),
            n if n % 2 == 0 => return Err(EvaluationError::EvenVoteCount { item_id: t.item_id.clone(), votes: n }),
            _ => {}
        }
        items.push(ItemOutcome {
            item_id: t.item_id.clone(),
            votes_a: a,
            votes_b: b,
            system_won: (a > b) == t.a_is_system,
        });
    }
    let wins = items.iter().filter(|o| o.system_won).count();
    Ok(PreferenceSummary { system_rate: wins as f64 / items.len() as f64, items })
}
