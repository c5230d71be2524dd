//! HTTP API over a loaded pair of translation models.
//!
//! Routes:
//! - `POST /api/translate` `{text, direction}` → `{output, tokens, log_score, model_id}`
//! - `GET /api/health` → model ids, corpus summary, label maps
//! - `POST /api/classify` `{text, labelmap_id}` → `{class, emoji, scores}`
//!
//! Every error body is `{"error": {"code", "message"}}`. Requests arriving
//! before the models are installed get 503.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use emotrans_core::corpus::{compute_stats, Corpus, CorpusError, CorpusStats};
use emotrans_core::transfer::{LabelMap, LabelScorer, TransferError, BUNDLED_LABEL_MAPS};
use emotrans_core::translator::{Direction, TranslationModel, TranslatorError};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error(transparent)]
    Translator(#[from] TranslatorError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("label map {0:?} is defined twice")]
    DuplicateLabelMap(String),
}

/// Everything the handlers read. Built once, never mutated.
#[derive(Debug)]
pub struct Models {
    t2e: TranslationModel,
    e2t: TranslationModel,
    t2e_id: String,
    e2t_id: String,
    scorers: BTreeMap<String, LabelScorer>,
    corpus: Option<CorpusSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub instances: usize,
    pub emoji_vocab: usize,
    pub avg_text_length: f64,
    pub avg_emoji_length: f64,
}

impl From<&CorpusStats> for CorpusSummary {
    fn from(s: &CorpusStats) -> Self {
        Self {
            instances: s.instance_count,
            emoji_vocab: s.emoji_vocab_size,
            avg_text_length: s.avg_text_length,
            avg_emoji_length: s.avg_emoji_length,
        }
    }
}

impl Models {
    /// Classification scorers are derived from the text-to-emoji lexicon
    /// for every bundled label map plus `extra_label_maps`.
    pub fn new(
        t2e: TranslationModel,
        e2t: TranslationModel,
        extra_label_maps: Vec<(String, LabelMap)>,
        corpus: Option<&CorpusStats>,
    ) -> Result<Self, ServiceError> {
        for (model, wanted) in [(&t2e, Direction::TextToEmoji), (&e2t, Direction::EmojiToText)] {
            if model.direction() != wanted {
                return Err(TranslatorError::DirectionMismatch { model: model.direction(), requested: wanted }.into());
            }
        }
        let mut scorers = BTreeMap::new();
        for name in BUNDLED_LABEL_MAPS {
            scorers.insert(name.to_string(), LabelScorer::from_lexicon(&t2e.lexicon, &LabelMap::bundled(name)?)?);
        }
        for (name, map) in extra_label_maps {
            if scorers.insert(name.clone(), LabelScorer::from_lexicon(&t2e.lexicon, &map)?).is_some() {
                return Err(ServiceError::DuplicateLabelMap(name));
            }
        }
        Ok(Self {
            t2e_id: t2e.model_id(),
            e2t_id: e2t.model_id(),
            t2e,
            e2t,
            scorers,
            corpus: corpus.map(CorpusSummary::from),
        })
    }

    /// Reads both model files, any label map files (named by file stem) and
    /// an optional corpus for the health summary.
    pub fn load(
        t2e: &Path,
        e2t: &Path,
        label_maps: &[impl AsRef<Path>],
        corpus: Option<&Path>,
    ) -> Result<Self, ServiceError> {
        let mut extra = Vec::new();
        for path in label_maps {
            let path = path.as_ref();
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            extra.push((name, LabelMap::load(path)?));
        }
        let stats = match corpus {
            Some(p) => Some(compute_stats(&Corpus::load_any(p)?, 10)?),
            None => None,
        };
        Self::new(TranslationModel::load(t2e)?, TranslationModel::load(e2t)?, extra, stats.as_ref())
    }

    pub fn model(&self, direction: Direction) -> &TranslationModel {
        match direction {
            Direction::TextToEmoji => &self.t2e,
            Direction::EmojiToText => &self.e2t,
        }
    }
}

/// Shared handler state; the models slot is filled exactly once.
#[derive(Debug, Clone, Default)]
pub struct AppState {
    models: Arc<OnceLock<Models>>,
}

impl AppState {
    /// State whose requests answer 503 until [`AppState::install`].
    pub fn loading() -> Self {
        Self::default()
    }

    pub fn ready(models: Models) -> Self {
        let state = Self::default();
        state.install(models);
        state
    }

    /// Returns false if models were already installed.
    pub fn install(&self, models: Models) -> bool {
        self.models.set(models).is_ok()
    }

    fn models(&self) -> Result<&Models, ApiError> {
        self.models.get().ok_or_else(|| ApiError::new(StatusCode::SERVICE_UNAVAILABLE, "loading", "models are loading"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into() }
    }

    fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = serde_json::json!({ "error": { "code": self.code, "message": self.message } });
        (self.status, Json(body)).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateRequest {
    pub text: String,
    pub direction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslateResponse {
    pub output: String,
    pub tokens: Vec<String>,
    pub log_score: f64,
    pub model_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRequest {
    pub text: String,
    pub labelmap_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResponse {
    pub class: String,
    pub emoji: String,
    pub scores: BTreeMap<String, f64>,
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("malformed_body", e.to_string()))
}

fn require_text(text: &str) -> Result<(), ApiError> {
    if text.trim().is_empty() {
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "empty_input", "text is empty"));
    }
    Ok(())
}

async fn translate(State(state): State<AppState>, body: Bytes) -> Result<Json<TranslateResponse>, ApiError> {
    let req: TranslateRequest = parse_body(&body)?;
    let direction: Direction =
        req.direction.parse().map_err(|e: String| ApiError::bad_request("unknown_direction", e))?;
    require_text(&req.text)?;
    let models = state.models()?;
    let t = models
        .model(direction)
        .translate(&req.text)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "translation_failed", e.to_string()))?;
    let model_id = match direction {
        Direction::TextToEmoji => models.t2e_id.clone(),
        Direction::EmojiToText => models.e2t_id.clone(),
    };
    Ok(Json(TranslateResponse { output: t.output, tokens: t.tokens, log_score: t.log_score, model_id }))
}

async fn health(State(state): State<AppState>) -> Result<Json<serde_json::Value>, ApiError> {
    let m = state.models()?;
    Ok(Json(serde_json::json!({
        "status": "ok",
        "models": { "t2e": m.t2e_id, "e2t": m.e2t_id },
        "corpus": m.corpus,
        "labelmaps": m.scorers.keys().collect::<Vec<_>>(),
    })))
}

async fn classify(State(state): State<AppState>, body: Bytes) -> Result<Json<ClassifyResponse>, ApiError> {
    let req: ClassifyRequest = parse_body(&body)?;
    require_text(&req.text)?;
    let models = state.models()?;
    let scorer = models
        .scorers
        .get(&req.labelmap_id)
        .ok_or_else(|| ApiError::bad_request("unknown_labelmap", format!("no label map {:?}", req.labelmap_id)))?;
    let class = emotrans_core::transfer::predict(scorer, &req.text);
    let idx = scorer.classes().iter().position(|c| *c == class).expect("predicted class exists");
    Ok(Json(ClassifyResponse { emoji: scorer.emojis()[idx].clone(), scores: scorer.score_map(&req.text), class }))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/translate", post(translate))
        .route("/api/health", get(health))
        .route("/api/classify", post(classify))
        .with_state(state)
}
