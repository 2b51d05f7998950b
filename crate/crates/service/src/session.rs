//! Session sources, per-session options and the lock-guarded session handle.

use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use foilwise_core::dialogue::{DialogueConfig, Transcript};
use foilwise_core::fixtures::firefight_models;
use foilwise_core::pddl::{load_manifest_str, load_manifest_with_options, ParseOptions};
use foilwise_core::planner::{DEFAULT_MAX_GENERATED, DEFAULT_MAX_TIME};
use foilwise_core::subsets::DEFAULT_FOIL_CAP;
use foilwise_core::{CancelToken, DialogueSession, Model, Planner, Response, SearchLimits};
use serde::{Deserialize, Serialize};

use crate::api::ApiError;

/// Where a session's robot and human models come from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSource {
    /// A manifest path on the server, relative to the configured root.
    Manifest(PathBuf),
    /// A bundled fixture by name.
    Fixture(String),
    /// The four PDDL documents inline.
    Inline { robot_domain: String, robot_problem: String, human_domain: String, human_problem: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub foil_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_ms: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateSession {
    #[serde(flatten, default, skip_serializing_if = "Option::is_none")]
    pub source: Option<ModelSource>,
    #[serde(default)]
    pub options: SessionOptions,
}

/// How sessions may load models.
#[derive(Clone, Debug, Default)]
pub struct SourcePolicy {
    /// Used when a creation request names no source.
    pub default_source: Option<ModelSource>,
    /// Root for manifest paths; `None` disables manifest sources.
    pub manifest_root: Option<PathBuf>,
}

impl SourcePolicy {
    pub fn load(&self, source: &ModelSource) -> Result<(Model, Model), ApiError> {
        match source {
            ModelSource::Fixture(name) if name == "firefight-mini" => Ok(firefight_models()),
            ModelSource::Fixture(name) => {
                Err(ApiError::new(axum::http::StatusCode::NOT_FOUND, "unknown_fixture", format!("no fixture `{name}`")))
            }
            ModelSource::Manifest(path) => {
                let root = self.manifest_root.as_deref().ok_or_else(|| {
                    ApiError::new(
                        axum::http::StatusCode::FORBIDDEN,
                        "manifest_paths_disabled",
                        "this server does not load manifests by path",
                    )
                })?;
                Ok(load_manifest_with_options(resolve(root, path)?, ParseOptions::default())?)
            }
            ModelSource::Inline { robot_domain, robot_problem, human_domain, human_problem } => {
                Ok(load_manifest_str(robot_domain, robot_problem, human_domain, human_problem, ParseOptions::default())?)
            }
        }
    }
}

fn resolve(root: &Path, path: &Path) -> Result<PathBuf, ApiError> {
    if path.components().any(|c| matches!(c, std::path::Component::ParentDir)) {
        return Err(ApiError::bad_request("manifest paths may not leave the manifest root"));
    }
    Ok(root.join(path))
}

pub fn dialogue_config(options: &SessionOptions) -> DialogueConfig {
    let limits = SearchLimits {
        max_generated: options.node_budget.unwrap_or(DEFAULT_MAX_GENERATED),
        max_time: options.time_budget_ms.map(Duration::from_millis).unwrap_or(DEFAULT_MAX_TIME),
        cancel: CancelToken::new(),
    };
    DialogueConfig { planner: Planner::with_limits(limits), foil_cap: options.foil_cap.unwrap_or(DEFAULT_FOIL_CAP) }
}

/// A live session. Operations take the lock, so each session has a single
/// writer; the cancel token is reachable without it.
#[derive(Debug)]
pub struct SessionHandle {
    pub request: CreateSession,
    pub cancel: CancelToken,
    /// Ground action names, fixed for the session's lifetime.
    pub catalog: Vec<String>,
    pub session: Mutex<DialogueSession>,
}

impl SessionHandle {
    pub fn create(policy: &SourcePolicy, mut request: CreateSession) -> Result<(SessionHandle, Response), ApiError> {
        if request.source.is_none() {
            request.source = policy.default_source.clone();
        }
        let source = request.source.as_ref().ok_or_else(|| ApiError::bad_request("no model source given"))?;
        let (robot, human) = policy.load(source)?;
        let (session, created) = DialogueSession::new(robot, human, dialogue_config(&request.options))?;
        let cancel = session.planner().cancel_token().clone();
        let catalog = session.robot().actions().iter().map(|a| a.name.clone()).collect();
        Ok((SessionHandle { request, cancel, catalog, session: Mutex::new(session) }, created))
    }

    /// Rebuilds a session by re-running a transcript. Fails unless every
    /// recorded response is reproduced.
    pub fn restore(policy: &SourcePolicy, request: CreateSession, transcript: &Transcript) -> Result<SessionHandle, ApiError> {
        let (handle, created) = SessionHandle::create(policy, request)?;
        let diverged = |step: usize| {
            ApiError::new(axum::http::StatusCode::CONFLICT, "snapshot_diverged", format!("replay differs at step {step}"))
        };
        if serde_json::to_value(&created).ok().as_ref() != Some(&transcript.created) {
            return Err(diverged(0));
        }
        {
            let mut session = handle.session.lock().expect("session lock");
            for (i, entry) in transcript.entries.iter().enumerate() {
                let _ = session.apply(entry.operation.clone());
                if session.transcript().entries[i].response != entry.response {
                    return Err(diverged(i + 1));
                }
            }
        }
        Ok(handle)
    }
}
