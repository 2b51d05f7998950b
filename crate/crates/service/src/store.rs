//! Pluggable session storage.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use foilwise_core::dialogue::Transcript;
use serde::{Deserialize, Serialize};

use crate::session::{CreateSession, SessionHandle, SourcePolicy};

/// What a file-backed store writes after every turn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub id: String,
    pub request: CreateSession,
    pub transcript: Transcript,
}

pub trait SessionStore: Send + Sync {
    fn insert(&self, id: String, handle: Arc<SessionHandle>);
    fn get(&self, id: &str) -> Option<Arc<SessionHandle>>;
    fn remove(&self, id: &str) -> Option<Arc<SessionHandle>>;
    /// Called after every operation with the session's current state.
    fn persist(&self, _snapshot: &Snapshot) -> io::Result<()> {
        Ok(())
    }
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    sessions: RwLock<HashMap<String, Arc<SessionHandle>>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl SessionStore for MemoryStore {
    fn insert(&self, id: String, handle: Arc<SessionHandle>) {
        self.sessions.write().expect("store lock").insert(id, handle);
    }

    fn get(&self, id: &str) -> Option<Arc<SessionHandle>> {
        self.sessions.read().expect("store lock").get(id).cloned()
    }

    fn remove(&self, id: &str) -> Option<Arc<SessionHandle>> {
        self.sessions.write().expect("store lock").remove(id)
    }
}

/// Outcome of [`FileStore::restore_all`].
#[derive(Debug, Default)]
pub struct Restored {
    pub ids: Vec<String>,
    /// Snapshots that could not be read or replayed, with the reason.
    pub failed: Vec<(PathBuf, String)>,
}

/// Keeps sessions in memory and writes one JSON snapshot per session to a
/// directory, so a restarted server can rebuild them.
#[derive(Debug)]
pub struct FileStore {
    memory: MemoryStore,
    dir: PathBuf,
}

impl FileStore {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(FileStore { memory: MemoryStore::new(), dir })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Reloads every snapshot in the directory by replaying its transcript.
    pub fn restore_all(&self, policy: &SourcePolicy) -> io::Result<Restored> {
        let mut restored = Vec::new();
        let mut failed = Vec::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let snapshot: Snapshot = match fs::read_to_string(&path).map_err(|e| e.to_string()).and_then(|t| {
                serde_json::from_str(&t).map_err(|e| e.to_string())
            }) {
                Ok(s) => s,
                Err(e) => {
                    failed.push((path, e));
                    continue;
                }
            };
            match SessionHandle::restore(policy, snapshot.request, &snapshot.transcript) {
                Ok(handle) => {
                    self.memory.insert(snapshot.id.clone(), Arc::new(handle));
                    restored.push(snapshot.id);
                }
                Err(e) => failed.push((path, e.message)),
            }
        }
        Ok(Restored { ids: restored, failed })
    }
}

impl SessionStore for FileStore {
    fn insert(&self, id: String, handle: Arc<SessionHandle>) {
        self.memory.insert(id, handle);
    }

    fn get(&self, id: &str) -> Option<Arc<SessionHandle>> {
        self.memory.get(id)
    }

    fn remove(&self, id: &str) -> Option<Arc<SessionHandle>> {
        let _ = fs::remove_file(self.path(id));
        self.memory.remove(id)
    }

    fn persist(&self, snapshot: &Snapshot) -> io::Result<()> {
        let text = serde_json::to_string_pretty(snapshot).map_err(io::Error::other)?;
        let tmp = self.dir.join(format!(".{}.tmp", snapshot.id));
        fs::write(&tmp, text)?;
        fs::rename(tmp, self.path(&snapshot.id))
    }
}
