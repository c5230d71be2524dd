use super::{CorpusError, ParallelInstance};

/// Topic domains queried by default, in query order.
pub const DEFAULT_TOPICS: [&str; 17] = [
    "feeling",
    "career",
    "clothes",
    "animal",
    "plant",
    "weather",
    "food",
    "sports",
    "arts",
    "vehicle",
    "building",
    "tool",
    "country",
    "electrical appliance",
    "activity",
    "experience",
    "family member",
];

/// The single-turn generation prompt for `topic`.
pub fn render_startup_prompt(topic: &str) -> Result<String, CorpusError> {
    let topic = topic.trim();
    if topic.is_empty() {
        return Err(CorpusError::EmptyTopic);
    }
    Ok(format!(
        "Write some sentences about a kind of {topic} and their pure emoji series translations \
         in the following format: Text:... Emoji Translation:..."
    ))
}

/// The two-turn prompt that shows the model one existing pair before it
/// continues: the user turn is the startup prompt, the system turn is the
/// exemplar.
pub fn render_conditioned_prompt(topic: &str, exemplar: &ParallelInstance) -> Result<String, CorpusError> {
    let user = render_startup_prompt(topic)?;
    Ok(format!("User: {user}\nSystem: Text: {} Emoji: {}", exemplar.text(), exemplar.emoji_string()))
}
