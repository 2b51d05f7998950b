//! Operations that outlive the response threshold continue as jobs.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum JobState {
    Running,
    Done { http_status: u16, result: Value },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JobView {
    pub job: String,
    pub session: String,
    #[serde(flatten)]
    pub state: JobState,
}

#[derive(Debug, Default)]
pub struct JobRegistry {
    jobs: Mutex<HashMap<String, JobView>>,
}

impl JobRegistry {
    pub fn start(&self, session: &str) -> String {
        let job = uuid::Uuid::new_v4().to_string();
        let view = JobView { job: job.clone(), session: session.into(), state: JobState::Running };
        self.jobs.lock().expect("job lock").insert(job.clone(), view);
        job
    }

    pub fn finish(&self, job: &str, http_status: u16, result: Value) {
        if let Some(view) = self.jobs.lock().expect("job lock").get_mut(job) {
            view.state = JobState::Done { http_status, result };
        }
    }

    /// Drops a job whose result went straight back to the caller.
    pub fn discard(&self, job: &str) {
        self.jobs.lock().expect("job lock").remove(job);
    }

    pub fn get(&self, job: &str) -> Option<JobView> {
        self.jobs.lock().expect("job lock").get(job).cloned()
    }

    /// Forgets every job of a closed session.
    pub fn drop_session(&self, session: &str) {
        self.jobs.lock().expect("job lock").retain(|_, v| v.session != session);
    }
}
