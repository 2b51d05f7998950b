//! Request bodies, the error envelope and the status-code mapping.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use foilwise_core::{Answer, DialogueError, PddlError};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoilRequest {
    pub actions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationRef {
    pub explanation: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RespondRequest {
    #[serde(flatten)]
    pub answer: Answer,
}

#[derive(Clone, Debug, Deserialize)]
pub struct RefineQuery {
    pub strategy: Option<String>,
}

/// A failure rendered as `{"error": {"code", "message"}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, code: code.into(), message: message.into() }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn unknown_session(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session `{id}`"))
    }

    pub fn body(&self) -> Value {
        json!({ "error": { "code": self.code, "message": self.message } })
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body())).into_response()
    }
}

impl From<DialogueError> for ApiError {
    fn from(e: DialogueError) -> Self {
        ApiError::new(status_for(e.code()), e.code(), e.to_string())
    }
}

impl From<PddlError> for ApiError {
    fn from(e: PddlError) -> Self {
        ApiError::new(status_for(e.code()), e.code(), e.to_string())
    }
}

/// HTTP status for a machine-readable error code.
pub fn status_for(code: &str) -> StatusCode {
    match code {
        "bad_request" | "unknown_action" | "invalid_choice" | "foil_too_large" | "invalid_index" | "invalid_strategy" => {
            StatusCode::BAD_REQUEST
        }
        "unknown_session" | "unknown_job" | "unknown_explanation" => StatusCode::NOT_FOUND,
        "no_pending_foil" | "nothing_to_explain" | "stale_veto" | "stale_accept" => StatusCode::CONFLICT,
        "resource_limit" => StatusCode::SERVICE_UNAVAILABLE,
        "io_error" | "manifest_paths_disabled" => StatusCode::FORBIDDEN,
        "internal" => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

/// Parses a JSON body, reporting failures in the error envelope.
pub fn parse_body<T: serde::de::DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}
