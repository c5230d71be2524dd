use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use emotrans_core::corpus::compute_stats;
use emotrans_core::emoji::emoji_tokens;
use emotrans_core::synthetic::{oracle_corpus, OracleConfig};
use emotrans_core::translator::{Direction, TrainOptions, TranslationModel};
use emotrans_service::{router, AppState, Models, TranslateResponse};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn models() -> Models {
    let corpus = oracle_corpus(&OracleConfig { sentences: 200, ..OracleConfig::default() });
    let opts = TrainOptions { iterations: 10, ..TrainOptions::default() };
    let t2e = TranslationModel::train(&corpus, Direction::TextToEmoji, &opts).unwrap().0;
    let e2t = TranslationModel::train(&corpus, Direction::EmojiToText, &opts).unwrap().0;
    Models::new(t2e, e2t, Vec::new(), Some(&compute_stats(&corpus, 10).unwrap())).unwrap()
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<String>) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn translate_body(text: &str, direction: &str) -> Option<String> {
    Some(json!({ "text": text, "direction": direction }).to_string())
}

fn assert_error(body: &Value, code: &str) {
    assert_eq!(body["error"]["code"], code, "{body}");
    assert!(body["error"]["message"].as_str().is_some_and(|m| !m.is_empty()));
}

#[tokio::test]
async fn translate_both_directions() {
    let app = router(AppState::ready(models()));
    let (status, body) = call(&app, "POST", "/api/translate", translate_body("I love my dog", "t2e")).await;
    assert_eq!(status, StatusCode::OK);
    let resp: TranslateResponse = serde_json::from_value(body).unwrap();
    assert_eq!(resp.output, "🐶");
    let resegmented: Vec<String> = emoji_tokens(&resp.output).into_iter().map(|t| t.into_string()).collect();
    assert_eq!(resegmented, resp.tokens);
    assert!(resp.model_id.starts_with("t2e-"));

    let (status, body) = call(&app, "POST", "/api/translate", translate_body("🐶🍕", "e2t")).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["output"], "dog pizza");
    assert!(body["model_id"].as_str().unwrap().starts_with("e2t-"));
}

#[tokio::test]
async fn request_errors() {
    let app = router(AppState::ready(models()));
    let (status, body) = call(&app, "POST", "/api/translate", translate_body("hi", "x2y")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&body, "unknown_direction");
    let (status, body) = call(&app, "POST", "/api/translate", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&body, "malformed_body");
    let (status, body) = call(&app, "POST", "/api/translate", translate_body("   ", "t2e")).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_error(&body, "empty_input");
    let classify = json!({ "text": "dog", "labelmap_id": "nope" }).to_string();
    let (status, body) = call(&app, "POST", "/api/classify", Some(classify)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&body, "unknown_labelmap");
}

#[tokio::test]
async fn loading_then_ready() {
    let state = AppState::loading();
    let app = router(state.clone());
    let (status, body) = call(&app, "GET", "/api/health", None).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_error(&body, "loading");
    let (status, _) = call(&app, "POST", "/api/translate", translate_body("dog", "t2e")).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);

    assert!(state.install(models()));
    let (status, body) = call(&app, "GET", "/api/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["status"], "ok");
    assert!(body["models"]["t2e"].as_str().unwrap().starts_with("t2e-"));
    assert_eq!(body["corpus"]["instances"], 200);
    assert!(body["labelmaps"].as_array().unwrap().iter().any(|m| m == "sentiment"));
}

#[tokio::test]
async fn classify_returns_a_class_and_finite_scores() {
    let app = router(AppState::ready(models()));
    let body = json!({ "text": "ball and star", "labelmap_id": "ag_news" }).to_string();
    let (status, body) = call(&app, "POST", "/api/classify", Some(body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["class"], "sports");
    assert_eq!(body["emoji"], "⚽");
    let scores = body["scores"].as_object().unwrap();
    assert_eq!(scores.len(), 4);
    assert!(scores.values().all(|v| v.as_f64().is_some_and(f64::is_finite)));
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_requests_do_not_interfere() {
    let app = router(AppState::ready(models()));
    let inputs = ["my dog", "pizza and coffee", "the rocket", "a cat with fish"];
    let mut expected = Vec::new();
    for text in inputs {
        expected.push(call(&app, "POST", "/api/translate", translate_body(text, "t2e")).await);
    }
    let handles: Vec<_> = (0..32)
        .map(|i| {
            let app = app.clone();
            let text = inputs[i % inputs.len()];
            tokio::spawn(async move { (i, call(&app, "POST", "/api/translate", translate_body(text, "t2e")).await) })
        })
        .collect();
    for h in handles {
        let (i, got) = h.await.unwrap();
        assert_eq!(got, expected[i % inputs.len()]);
    }
}
