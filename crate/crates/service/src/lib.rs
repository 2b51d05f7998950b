//! HTTP front end for explanatory dialogue sessions.
//!
//! Every mutating endpoint maps to one [`Operation`] on the session and
//! answers with the same JSON the session records in its transcript. An
//! operation still running after the job threshold answers `202` with a job
//! handle to poll at `GET /jobs/{id}`.

pub mod api;
pub mod jobs;
pub mod session;
pub mod store;

use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use foilwise_core::{DialogueError, Operation, Strategy};
use serde_json::{json, Value};

use api::{parse_body, status_for, ApiError, ExplanationRef, FoilRequest, RefineQuery, RespondRequest};
use jobs::JobRegistry;
use session::{CreateSession, SessionHandle, SourcePolicy};
use store::{SessionStore, Snapshot};

pub const DEFAULT_JOB_THRESHOLD: Duration = Duration::from_secs(2);

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub policy: SourcePolicy,
    /// Operations running longer than this continue as jobs.
    pub job_threshold: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { policy: SourcePolicy::default(), job_threshold: DEFAULT_JOB_THRESHOLD }
    }
}

#[derive(Clone)]
pub struct AppState {
    config: Arc<ServiceConfig>,
    store: Arc<dyn SessionStore>,
    jobs: Arc<JobRegistry>,
}

impl AppState {
    pub fn new(config: ServiceConfig, store: Arc<dyn SessionStore>) -> Self {
        AppState { config: Arc::new(config), store, jobs: Arc::new(JobRegistry::default()) }
    }

    fn session(&self, id: &str) -> Result<Arc<SessionHandle>, ApiError> {
        self.store.get(id).ok_or_else(|| ApiError::unknown_session(id))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", axum::routing::delete(close_session))
        .route("/sessions/{id}/plan", get(get_plan))
        .route("/sessions/{id}/catalog", get(catalog))
        .route("/sessions/{id}/foil", post(submit_foil))
        .route("/sessions/{id}/explain", post(explain))
        .route("/sessions/{id}/explain/accept", post(accept))
        .route("/sessions/{id}/explain/veto", post(veto))
        .route("/sessions/{id}/refine", post(refine))
        .route("/sessions/{id}/respond", post(respond))
        .route("/sessions/{id}/cancel", post(cancel))
        .route("/sessions/{id}/transcript", get(transcript))
        .route("/jobs/{id}", get(job))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, state: AppState) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn create_session(State(state): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let request: CreateSession = if body.is_empty() { CreateSession::default() } else { parse_body(&body)? };
    let policy = state.config.policy.clone();
    let (handle, created) = tokio::task::spawn_blocking(move || SessionHandle::create(&policy, request))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    let id = uuid::Uuid::new_v4().to_string();
    let created = serde_json::to_value(&created).expect("responses serialize");
    let snapshot = Snapshot {
        id: id.clone(),
        request: handle.request.clone(),
        transcript: handle.session.lock().expect("session lock").transcript().clone(),
    };
    persist(&state, &snapshot);
    state.store.insert(id.clone(), Arc::new(handle));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "created": created }))).into_response())
}

async fn close_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    let handle = state.store.remove(&id).ok_or_else(|| ApiError::unknown_session(&id))?;
    handle.cancel.cancel();
    state.jobs.drop_session(&id);
    Ok(StatusCode::NO_CONTENT)
}

fn persist(state: &AppState, snapshot: &Snapshot) {
    if let Err(e) = state.store.persist(snapshot) {
        eprintln!("snapshot of session {} failed: {e}", snapshot.id);
    }
}

/// Runs `operation` on the session's blocking pool. Answers with the result
/// if it finishes within the job threshold, otherwise with a job handle.
async fn run(state: AppState, id: String, operation: Operation) -> Result<Response, ApiError> {
    let handle = state.session(&id)?;
    let job = state.jobs.start(&id);
    let work = {
        let (state, id) = (state.clone(), id.clone());
        move || {
            let mut session = handle.session.lock().unwrap_or_else(|p| p.into_inner());
            let result = session.apply(operation);
            let snapshot = Snapshot { id, request: handle.request.clone(), transcript: session.transcript().clone() };
            persist(&state, &snapshot);
            render(result)
        }
    };
    let runner = {
        let (jobs, job) = (state.jobs.clone(), job.clone());
        tokio::spawn(async move {
            let (status, body) = tokio::task::spawn_blocking(work).await.unwrap_or_else(|e| {
                let err = ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string());
                (err.status, err.body())
            });
            jobs.finish(&job, status.as_u16(), body.clone());
            (status, body)
        })
    };
    match tokio::time::timeout(state.config.job_threshold, runner).await {
        Ok(Ok((status, body))) => {
            state.jobs.discard(&job);
            Ok((status, Json(body)).into_response())
        }
        Ok(Err(e)) => Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())),
        Err(_) => {
            let view = state.jobs.get(&job).expect("running job is registered");
            Ok((StatusCode::ACCEPTED, Json(view)).into_response())
        }
    }
}

fn render(result: Result<foilwise_core::Response, DialogueError>) -> (StatusCode, Value) {
    match result {
        Ok(r) => (StatusCode::OK, serde_json::to_value(r).expect("responses serialize")),
        Err(e) => (status_for(e.code()), e.to_json()),
    }
}

async fn get_plan(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    run(state, id, Operation::GetPlan).await
}

async fn catalog(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let handle = state.session(&id)?;
    Ok(Json(json!({ "actions": handle.catalog })))
}

async fn submit_foil(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let FoilRequest { actions } = parse_body(&body)?;
    run(state, id, Operation::SubmitFoil { actions }).await
}

async fn explain(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    run(state, id, Operation::Explain).await
}

async fn accept(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let ExplanationRef { explanation } = parse_body(&body)?;
    run(state, id, Operation::Accept { explanation }).await
}

async fn veto(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let ExplanationRef { explanation } = parse_body(&body)?;
    run(state, id, Operation::Veto { explanation }).await
}

async fn refine(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<RefineQuery>,
) -> Result<Response, ApiError> {
    let Some(strategy) = query.strategy else {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "invalid_strategy", "missing `strategy` query parameter"));
    };
    let strategy: Strategy =
        strategy.parse().map_err(|e: String| ApiError::new(StatusCode::BAD_REQUEST, "invalid_strategy", e))?;
    run(state, id, Operation::Refine { strategy }).await
}

async fn respond(State(state): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let RespondRequest { answer } = parse_body(&body)?;
    run(state, id, Operation::Respond { answer }).await
}

async fn cancel(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    // Interrupt whatever holds the session, then clear pending state once
    // the lock frees up.
    state.session(&id)?.cancel.cancel();
    run(state, id, Operation::Cancel).await
}

async fn transcript(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let handle = state.session(&id)?;
    let transcript = tokio::task::spawn_blocking(move || {
        let session = handle.session.lock().unwrap_or_else(|p| p.into_inner());
        serde_json::to_value(session.transcript()).expect("transcripts serialize")
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?;
    Ok(Json(transcript))
}

async fn job(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<jobs::JobView>, ApiError> {
    state.jobs.get(&id).map(Json).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "unknown_job", format!("no job `{id}`")))
}
