mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use serde_json::{json, Value};
use threatlens_core::clock::ManualClock;
use threatlens_service::{build_router, AppState, CorsConfig, ServiceConfig};
use tower::ServiceExt;

const NOW: i64 = 1_700_000_000_000;

fn app_with(bundle: Option<threatlens_core::ModelBundle>) -> (Router, AppState) {
    let config = ServiceConfig::default();
    let state = AppState::new(bundle, &config, Arc::new(ManualClock::new(NOW))).unwrap();
    (build_router(state.clone(), &CorsConfig::default()), state)
}

fn app() -> Router {
    app_with(Some(common::sample_bundle())).0
}

async fn call(app: &Router, method: Method, path: &str, body: Option<&str>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(path);
    if body.is_some() {
        req = req.header(header::CONTENT_TYPE, "application/json");
    }
    let req = req
        .body(body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let ct = resp
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string());
    let bytes = axum::body::to_bytes(resp.into_body(), usize::MAX).await.unwrap();
    assert_eq!(ct.as_deref(), Some("application/json"), "{path}");
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn assert_error(v: &Value, code: &str) {
    assert_eq!(v["code"], code, "{v}");
    assert!(v["error"].as_str().is_some_and(|s| !s.is_empty()));
    assert_eq!(v.as_object().unwrap().len(), 2);
}

#[tokio::test]
async fn health_lists_loaded_models() {
    let (status, v) = call(&app(), Method::GET, "/api/v1/health", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v, json!({"status": "ok", "models_loaded": ["nb", "gbdt"], "format_version": 1}));

    let (empty, _) = app_with(None);
    let (_, v) = call(&empty, Method::GET, "/api/v1/health", None).await;
    assert_eq!(v["models_loaded"], json!([]));
}

#[tokio::test]
async fn classify_url_contract() {
    let app = app();
    let (status, v) = call(
        &app,
        Method::POST,
        "/api/v1/classify-url",
        Some(r#"{"url":"http://paypal-login.verify-account.tk/secure/update.php"}"#),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!(matches!(v["verdict"].as_str(), Some("phishing" | "legitimate")));
    let score = v["score"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&score));
    assert_eq!(v["input_echo"], "http://paypal-login.verify-account.tk/secure/update.php");
    assert_eq!(v["model_version"].as_str().unwrap().len(), 12);
    assert!(v["latency_ms"].as_f64().unwrap() >= 0.0);
    assert!(v["imputed_feature_count"].as_u64().unwrap() > 0);
    assert!(v.get("text_stats").is_none());
    assert!(v.get("providers").is_none());
}

#[tokio::test]
async fn classify_url_is_deterministic() {
    let app = app();
    let body = r#"{"url":"https://www.example.com/a/b?c=d"}"#;
    let (_, a) = call(&app, Method::POST, "/api/v1/classify-url", Some(body)).await;
    let (_, b) = call(&app, Method::POST, "/api/v1/classify-url", Some(body)).await;
    assert_eq!(a["score"], b["score"]);
    assert_eq!(a["verdict"], b["verdict"]);
}

#[tokio::test]
async fn malformed_url_is_400() {
    for url in ["", "not a url", "http://", "http://a..b/", "http://[::1/x", "http://a.com:99999/"] {
        let body = json!({ "url": url }).to_string();
        let (status, v) = call(&app(), Method::POST, "/api/v1/classify-url", Some(&body)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{url:?}");
        assert_error(&v, "malformed_url");
    }
}

#[tokio::test]
async fn classify_text_contract() {
    let (status, v) = call(
        &app(),
        Method::POST,
        "/api/v1/classify-text",
        Some(r#"{"text":"WINNER!! Claim your free prize now. Call 09061701461. Reply STOP."}"#),
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    assert!(matches!(v["verdict"].as_str(), Some("spam" | "ham")));
    assert!((0.0..=1.0).contains(&v["score"].as_f64().unwrap()));
    let stats = &v["text_stats"];
    assert!(stats["num_characters"].as_u64().unwrap() > 0);
    assert!(stats["num_words"].as_u64().unwrap() > 0);
    assert!(stats["num_sentences"].as_u64().unwrap() >= 1);
    assert!(v.get("imputed_feature_count").is_none());
}

#[tokio::test]
async fn empty_text_is_400() {
    for text in ["", "   \n\t"] {
        let body = json!({ "text": text }).to_string();
        let (status, v) = call(&app(), Method::POST, "/api/v1/classify-text", Some(&body)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_error(&v, "empty_text");
    }
}

#[tokio::test]
async fn long_input_echo_is_truncated() {
    let text = "free ".repeat(1000);
    let body = json!({ "text": text }).to_string();
    let (status, v) = call(&app(), Method::POST, "/api/v1/classify-text", Some(&body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["input_echo"].as_str().unwrap().chars().count(), 2048);
}

#[tokio::test]
async fn missing_models_are_503() {
    let (app, state) = app_with(None);
    let (status, v) = call(&app, Method::POST, "/api/v1/classify-url", Some(r#"{"url":"http://a.com"}"#)).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_error(&v, "model_not_loaded");
    let (status, v) = call(&app, Method::POST, "/api/v1/classify-text", Some(r#"{"text":"hi"}"#)).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_error(&v, "model_not_loaded");

    state.reload(Some(common::sample_bundle())).unwrap();
    let (status, _) = call(&app, Method::POST, "/api/v1/classify-text", Some(r#"{"text":"hi"}"#)).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn bad_json_and_unknown_routes() {
    let app = app();
    let (status, v) = call(&app, Method::POST, "/api/v1/classify-url", Some("{not json")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&v, "bad_request");
    let (status, v) = call(&app, Method::POST, "/api/v1/classify-url", Some(r#"{"link":"x"}"#)).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_error(&v, "bad_request");

    let (status, v) = call(&app, Method::GET, "/api/v1/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_error(&v, "not_found");
    let (status, v) = call(&app, Method::GET, "/api/v1/classify-url", None).await;
    assert_eq!(status, StatusCode::METHOD_NOT_ALLOWED);
    assert_error(&v, "method_not_allowed");
    let (status, v) = call(&app, Method::POST, "/api/v1/health", Some("{}")).await;
    assert_eq!(status, StatusCode::METHOD_NOT_ALLOWED);
    assert_error(&v, "method_not_allowed");
}

fn log(ts: i64, code: i64, url: &str) -> Value {
    json!({"timestamp": ts, "method": "GET", "url": url, "status_code": code})
}

#[tokio::test]
async fn logs_report_shape_and_counts() {
    let app = app();
    let entries = vec![
        log(NOW - 1000, 200, "https://a.example.com/"),
        log(NOW - 900, 302, "https://a.example.com/x"),
        log(NOW - 800, 404, "https://bad.example.net/1"),
        log(NOW - 700, 503, "https://bad.example.net/2"),
        log(NOW - 600, 101, "wss://a.example.com/sock"),
    ];
    let body = json!({ "entries": entries }).to_string();
    let (status, v) = call(&app, Method::POST, "/api/v1/logs", Some(&body)).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        v["counts"],
        json!({"success": 1, "redirection": 1, "client_error": 1, "server_error": 1, "other": 1})
    );
    assert_eq!(v["total"], 5);
    assert_eq!(v["error_ratio"], 0.4);
    assert_eq!(v["threat_level"], "high");
    assert_eq!(v["window_end"], NOW);
    assert_eq!(v["window_start"], NOW - 300_000);
    assert_eq!(v["offending_hosts"], json!([{"host": "bad.example.net", "errors": 2}]));

    // Counts accumulate across batches.
    let body = json!({ "entries": [log(NOW - 10, 200, "https://a.example.com/")] }).to_string();
    let (_, v) = call(&app, Method::POST, "/api/v1/logs", Some(&body)).await;
    assert_eq!(v["total"], 6);
}

#[tokio::test]
async fn logs_reject_bad_entries_atomically() {
    let app = app();
    for bad in [
        log(NOW, 700, "https://a.com/"),
        log(NOW, 99, "https://a.com/"),
        log(NOW, -1, "https://a.com/"),
        log(-5, 200, "https://a.com/"),
        json!({"timestamp": NOW, "method": "", "url": "https://a.com/", "status_code": 200}),
    ] {
        let body = json!({ "entries": [log(NOW, 200, "https://a.com/"), bad] }).to_string();
        let (status, v) = call(&app, Method::POST, "/api/v1/logs", Some(&body)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_error(&v, "invalid_entry");
        assert!(v["error"].as_str().unwrap().starts_with("entry 1"));
    }
    let (_, v) = call(&app, Method::POST, "/api/v1/logs", Some(r#"{"entries":[]}"#)).await;
    assert_eq!(v["total"], 0);
    assert_eq!(v["threat_level"], "none");
}

#[tokio::test]
async fn cors_allows_extensions_only() {
    let app = app();
    let preflight = |origin: &'static str| {
        Request::builder()
            .method(Method::OPTIONS)
            .uri("/api/v1/classify-url")
            .header(header::ORIGIN, origin)
            .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
            .header(header::ACCESS_CONTROL_REQUEST_HEADERS, "content-type")
            .body(Body::empty())
            .unwrap()
    };
    for origin in ["chrome-extension://abcdefghijklmnop", "moz-extension://1234-5678"] {
        let resp = app.clone().oneshot(preflight(origin)).await.unwrap();
        assert_eq!(
            resp.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).unwrap(),
            origin
        );
        assert!(resp.headers().get(header::ACCESS_CONTROL_ALLOW_CREDENTIALS).is_none());
    }
    let resp = app.clone().oneshot(preflight("https://evil.example")).await.unwrap();
    assert!(resp.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).is_none());

    let cfg = CorsConfig {
        allow_extensions: false,
        allowed_origins: vec!["http://localhost:3000".into()],
    };
    let state = AppState::new(None, &ServiceConfig::default(), Arc::new(ManualClock::new(NOW))).unwrap();
    let app = build_router(state, &cfg);
    let resp = app.clone().oneshot(preflight("http://localhost:3000")).await.unwrap();
    assert!(resp.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).is_some());
    let resp = app.oneshot(preflight("chrome-extension://abc")).await.unwrap();
    assert!(resp.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).is_none());
}

#[tokio::test]
async fn enrichment_reports_providers_when_enabled() {
    let mut config = ServiceConfig::default();
    config.providers.enabled = true;
    let state = AppState::new(
        Some(common::sample_bundle()),
        &config,
        Arc::new(ManualClock::new(NOW)),
    )
    .unwrap();
    let app = build_router(state, &config.cors);
    let (status, v) = call(&app, Method::POST, "/api/v1/classify-url", Some(r#"{"url":"http://example.org/"}"#)).await;
    assert_eq!(status, StatusCode::OK);
    let providers = v["providers"].as_array().unwrap();
    assert_eq!(providers.len(), 2);
    assert!(providers.iter().all(|p| p["outcome"] == "stubbed"));

    let (_, off) = call(
        &app,
        Method::POST,
        "/api/v1/classify-url",
        Some(r#"{"url":"http://example.org/","enrich":false}"#),
    )
    .await;
    assert!(off.get("providers").is_none());
    assert!(off["imputed_feature_count"].as_u64() > v["imputed_feature_count"].as_u64());
}

#[tokio::test]
async fn verdicts_agree_with_scores() {
    let app = app();
    for url in [
        "http://example.com/",
        "https://accounts.google.com/signin",
        "http://bit.ly/2xYz",
        "http://192.168.4.20/paypal/login.php?cmd=update&id=44",
        "http://secure-login-verify.paypal.com.account-update.tk/webscr",
    ] {
        let body = json!({ "url": url }).to_string();
        let (_, v) = call(&app, Method::POST, "/api/v1/classify-url", Some(&body)).await;
        let phishing = v["score"].as_f64().unwrap() >= 0.5;
        assert_eq!(v["verdict"] == "phishing", phishing, "{v}");
    }
    for text in ["hi, lunch?", "FREE entry to win cash, text WIN now", "ok"] {
        let body = json!({ "text": text }).to_string();
        let (_, v) = call(&app, Method::POST, "/api/v1/classify-text", Some(&body)).await;
        let spam = v["score"].as_f64().unwrap() > 0.5;
        assert_eq!(v["verdict"] == "spam", spam, "{v}");
    }
}
