use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use threatlens_core::api::{
    ClassifyTextRequest, ClassifyUrlRequest, HealthResponse, LogsRequest, VerdictResponse,
    CLASSIFY_TEXT_PATH, CLASSIFY_URL_PATH, HEALTH_PATH, LOGS_PATH,
};
use threatlens_core::logs::AnomalyReport;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::config::CorsConfig;
use crate::error::ApiError;
use crate::state::AppState;

type ApiResult<T> = Result<Json<T>, ApiError>;

async fn classify_url(
    State(state): State<AppState>,
    body: Result<Json<ClassifyUrlRequest>, JsonRejection>,
) -> ApiResult<VerdictResponse> {
    let Json(req) = body?;
    let engine = state.engine();
    Ok(Json(engine.classify_url(&req.url, req.enrich).await?))
}

async fn classify_text(
    State(state): State<AppState>,
    body: Result<Json<ClassifyTextRequest>, JsonRejection>,
) -> ApiResult<VerdictResponse> {
    let Json(req) = body?;
    Ok(Json(state.engine().classify_text(&req.text)?))
}

async fn logs(
    State(state): State<AppState>,
    body: Result<Json<LogsRequest>, JsonRejection>,
) -> ApiResult<AnomalyReport> {
    let Json(req) = body?;
    let newest = req.entries.iter().map(|e| e.timestamp).max();
    state
        .window()
        .ingest_batch(req.entries)
        .map_err(|(i, e)| {
            ApiError::new(
                StatusCode::BAD_REQUEST,
                "invalid_entry",
                format!("entry {i}: {e}"),
            )
        })?;
    // Slightly future client timestamps still land inside the window.
    let now = state.clock().now_ms().max(newest.unwrap_or(i64::MIN));
    Ok(Json(state.window().analyze(now)))
}

async fn health(State(state): State<AppState>) -> Json<HealthResponse> {
    let engine = state.engine();
    Json(HealthResponse {
        status: "ok".to_string(),
        models_loaded: engine.models_loaded(),
        format_version: engine.format_version(),
    })
}

fn cors_layer(cfg: &CorsConfig) -> CorsLayer {
    let allow_ext = cfg.allow_extensions;
    let listed: Vec<HeaderValue> = cfg
        .allowed_origins
        .iter()
        .filter_map(|o| HeaderValue::from_str(o).ok())
        .collect();
    CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(move |origin, _| {
            let o = origin.as_bytes();
            (allow_ext
                && (o.starts_with(b"chrome-extension://") || o.starts_with(b"moz-extension://")))
                || listed.iter().any(|l| l == origin)
        }))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE])
}

pub fn build_router(state: AppState, cors: &CorsConfig) -> Router {
    Router::new()
        .route(CLASSIFY_URL_PATH, post(classify_url))
        .route(CLASSIFY_TEXT_PATH, post(classify_text))
        .route(LOGS_PATH, post(logs))
        .route(HEALTH_PATH, get(health))
        .fallback(|| async { ApiError::not_found() })
        .method_not_allowed_fallback(|| async { ApiError::method_not_allowed() })
        .layer(cors_layer(cors))
        .with_state(state)
}
