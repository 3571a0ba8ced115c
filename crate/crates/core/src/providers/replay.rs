//! Content-addressed record/replay store.
//!
//! Each request is identified by the sha256 of its canonical JSON key and
//! stored as `<dir>/<hash>.json`. In `LiveRecord` mode the store doubles as
//! a cache: hits are served from disk and misses go upstream and are written
//! through. `ReplayOnly` never calls upstream.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{ChatModel, CompletionRequest, PairScorer};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CacheMode {
    LiveRecord,
    ReplayOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreKind {
    Entail,
    Check,
}

/// Request identity. Serialized field order is fixed, so the hash is stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RequestKey {
    Chat {
        template_id: String,
        rendered_prompt: String,
        temperature: f64,
        seed: Option<u64>,
        model_tag: String,
    },
    Entail {
        premise: String,
        hypothesis: String,
        model_tag: String,
    },
    Check {
        evidence: String,
        claim: String,
        model_tag: String,
    },
}

impl RequestKey {
    pub fn chat(req: &CompletionRequest) -> Self {
        RequestKey::Chat {
            template_id: req.template_id.clone(),
            rendered_prompt: req.rendered_prompt.clone(),
            temperature: req.temperature,
            seed: req.seed,
            model_tag: req.model_tag.clone(),
        }
    }

    pub fn score(kind: ScoreKind, first: &str, second: &str, model_tag: &str) -> Self {
        match kind {
            ScoreKind::Entail => RequestKey::Entail {
                premise: first.to_string(),
                hypothesis: second.to_string(),
                model_tag: model_tag.to_string(),
            },
            ScoreKind::Check => RequestKey::Check {
                evidence: first.to_string(),
                claim: second.to_string(),
                model_tag: model_tag.to_string(),
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            RequestKey::Chat { .. } => "chat",
            RequestKey::Entail { .. } => "entail",
            RequestKey::Check { .. } => "check",
        }
    }

    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("request keys always serialize");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StoreEntry {
    pub hash: String,
    pub request: RequestKey,
    pub response: Value,
}

#[derive(Debug, Default, Clone, PartialEq, Eq, Serialize)]
pub struct StoreSummary {
    pub entries: usize,
    pub chat: usize,
    pub entail: usize,
    pub check: usize,
}

pub struct ReplayStore {
    dir: PathBuf,
    mode: CacheMode,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl ReplayStore {
    pub fn open(dir: impl Into<PathBuf>, mode: CacheMode) -> Result<Self> {
        let dir = dir.into();
        match mode {
            CacheMode::LiveRecord => fs::create_dir_all(&dir)
                .map_err(|e| Error::io(format!("creating replay store {}", dir.display()), e))?,
            CacheMode::ReplayOnly if !dir.is_dir() => {
                return Err(Error::Config(format!(
                    "replay store {} does not exist",
                    dir.display()
                )))
            }
            CacheMode::ReplayOnly => {}
        }
        Ok(ReplayStore {
            dir,
            mode,
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn mode(&self) -> CacheMode {
        self.mode
    }

    fn entry_path(&self, hash: &str) -> PathBuf {
        self.dir.join(format!("{hash}.json"))
    }

    fn key_lock(&self, hash: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|p| p.into_inner());
        locks.entry(hash.to_string()).or_default().clone()
    }

    pub fn lookup(&self, key: &RequestKey) -> Result<Option<Value>> {
        let path = self.entry_path(&key.hash());
        if !path.exists() {
            return Ok(None);
        }
        let raw = fs::read(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let entry: StoreEntry = serde_json::from_slice(&raw)?;
        Ok(Some(entry.response))
    }

    /// Serve `key` from the store, or (in record mode) from `upstream`.
    /// Concurrent callers with the same key are serialized, so each key
    /// reaches upstream at most once.
    pub fn fetch(
        &self,
        key: &RequestKey,
        upstream: Option<&dyn Fn() -> Result<Value>>,
    ) -> Result<Value> {
        let hash = key.hash();
        let lock = self.key_lock(&hash);
        let _guard = lock.lock().unwrap_or_else(|p| p.into_inner());

        if let Some(found) = self.lookup(key)? {
            return Ok(found);
        }
        if self.mode == CacheMode::ReplayOnly {
            return Err(Error::ReplayMiss {
                hash,
                kind: key.kind().to_string(),
            });
        }
        let upstream = upstream.ok_or_else(|| {
            Error::ProviderUnavailable(format!("no upstream provider for {} request {hash}", key.kind()))
        })?;
        let response = upstream()?;
        self.write(StoreEntry {
            hash,
            request: key.clone(),
            response: response.clone(),
        })?;
        Ok(response)
    }

    fn write(&self, entry: StoreEntry) -> Result<()> {
        let path = self.entry_path(&entry.hash);
        let tmp = self.dir.join(format!(".{}.tmp", entry.hash));
        let mut bytes = serde_json::to_vec_pretty(&entry)?;
        bytes.push(b'\n');
        fs::write(&tmp, &bytes).map_err(|e| Error::io(format!("writing {}", tmp.display()), e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(format!("renaming into {}", path.display()), e))
    }

    fn entry_files(&self) -> Result<Vec<PathBuf>> {
        let mut files = Vec::new();
        let listing = fs::read_dir(&self.dir)
            .map_err(|e| Error::io(format!("listing {}", self.dir.display()), e))?;
        for item in listing {
            let path = item.map_err(|e| Error::io("listing replay store", e))?.path();
            let is_entry = path.extension().is_some_and(|x| x == "json")
                && !path
                    .file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.starts_with('.'));
            if is_entry {
                files.push(path);
            }
        }
        files.sort();
        Ok(files)
    }

    /// Digest over every entry's file name and bytes, in name order.
    pub fn content_hash(&self) -> Result<String> {
        let mut hasher = Sha256::new();
        for path in self.entry_files()? {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            let bytes = fs::read(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
            hasher.update(&bytes);
        }
        Ok(hex::encode(hasher.finalize()))
    }

    pub fn summary(&self) -> Result<StoreSummary> {
        let mut summary = StoreSummary::default();
        for path in self.entry_files()? {
            let bytes = fs::read(&path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
            let entry: StoreEntry = serde_json::from_slice(&bytes)?;
            summary.entries += 1;
            match entry.request {
                RequestKey::Chat { .. } => summary.chat += 1,
                RequestKey::Entail { .. } => summary.entail += 1,
                RequestKey::Check { .. } => summary.check += 1,
            }
        }
        Ok(summary)
    }
}

/// Chat provider served through a [`ReplayStore`].
pub struct RecordedChat {
    store: Arc<ReplayStore>,
    upstream: Option<Arc<dyn ChatModel>>,
}

impl RecordedChat {
    pub fn new(store: Arc<ReplayStore>, upstream: Option<Arc<dyn ChatModel>>) -> Self {
        RecordedChat { store, upstream }
    }
}

impl ChatModel for RecordedChat {
    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        req.validate()?;
        let key = RequestKey::chat(req);
        let call = |upstream: &Arc<dyn ChatModel>| -> Result<Value> {
            Ok(json!({ "text": upstream.complete(req)? }))
        };
        let upstream_fn = self.upstream.as_ref().map(|u| move || call(u));
        let value = self
            .store
            .fetch(&key, upstream_fn.as_ref().map(|f| f as &dyn Fn() -> Result<Value>))?;
        let text = value
            .get("text")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::MalformedResponse(format!("replay entry {} has no text", key.hash())))?;
        if text.trim().is_empty() {
            return Err(Error::MalformedResponse(format!(
                "empty completion for template `{}`",
                req.template_id
            )));
        }
        Ok(text.to_string())
    }
}

/// Entailment or check scorer served through a [`ReplayStore`].
pub struct RecordedScorer {
    store: Arc<ReplayStore>,
    kind: ScoreKind,
    model_tag: String,
    upstream: Option<Arc<dyn PairScorer>>,
}

impl RecordedScorer {
    pub fn new(
        store: Arc<ReplayStore>,
        kind: ScoreKind,
        model_tag: impl Into<String>,
        upstream: Option<Arc<dyn PairScorer>>,
    ) -> Self {
        RecordedScorer {
            store,
            kind,
            model_tag: model_tag.into(),
            upstream,
        }
    }
}

impl PairScorer for RecordedScorer {
    fn score(&self, first: &str, second: &str) -> Result<f64> {
        let key = RequestKey::score(self.kind, first, second, &self.model_tag);
        let call = |upstream: &Arc<dyn PairScorer>| -> Result<Value> {
            Ok(json!({ "score": upstream.score(first, second)? }))
        };
        let upstream_fn = self.upstream.as_ref().map(|u| move || call(u));
        let value = self
            .store
            .fetch(&key, upstream_fn.as_ref().map(|f| f as &dyn Fn() -> Result<Value>))?;
        value
            .get("score")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::MalformedResponse(format!("replay entry {} has no score", key.hash())))
    }
}
