//! Run configuration, read from TOML.
//!
//! Relative paths resolve against the directory of the config file. In
//! replay-only mode no provider endpoint is needed: every answer comes from
//! the replay store.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::Strategy;
use crate::providers::{CacheMode, DEFAULT_CHECK_THRESHOLD, DEFAULT_ENTAILMENT_THRESHOLD, DEFAULT_TEMPERATURE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChatKind {
    /// OpenAI-compatible `chat/completions` endpoint.
    Http,
    /// Authored replies from a JSONL transcript.
    Scripted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChatConfig {
    #[serde(default = "ChatConfig::default_kind")]
    pub kind: ChatKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default = "ChatConfig::default_model")]
    pub model: String,
    /// Environment variable holding the API token.
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default)]
    pub transcript: Option<PathBuf>,
}

impl ChatConfig {
    fn default_kind() -> ChatKind {
        ChatKind::Http
    }

    fn default_model() -> String {
        "gpt-4".into()
    }
}

impl Default for ChatConfig {
    fn default() -> Self {
        ChatConfig {
            kind: Self::default_kind(),
            endpoint: None,
            model: Self::default_model(),
            token_env: None,
            transcript: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScorerKind {
    /// JSON endpoint answering `{"score": f}`.
    Http,
    /// Authored scores from a JSONL file, containment otherwise.
    Fixture,
    /// A chat model asked for a label (check only).
    Llm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScorerConfig {
    #[serde(default = "ScorerConfig::default_kind")]
    pub kind: ScorerKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    #[serde(default)]
    pub token_env: Option<String>,
    #[serde(default)]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub scores: Option<PathBuf>,
}

impl ScorerConfig {
    fn default_kind() -> ScorerKind {
        ScorerKind::Http
    }
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            kind: Self::default_kind(),
            endpoint: None,
            model: None,
            token_env: None,
            threshold: None,
            scores: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsConfig {
    /// Fact-check corpus for decomposition and the minimality experiment.
    #[serde(default)]
    pub factcheck: Option<PathBuf>,
    #[serde(default)]
    pub ambig_responses: Option<PathBuf>,
    #[serde(default)]
    pub ambig_claims: Option<PathBuf>,
    #[serde(default)]
    pub ambig_documents: Option<PathBuf>,
    /// Human labels for the auto non-minimal cases.
    #[serde(default)]
    pub minimality_annotations: Option<PathBuf>,
    /// Directory of `<template_id>.tmpl` files replacing the built-ins.
    #[serde(default)]
    pub templates_dir: Option<PathBuf>,
}

fn default_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

fn default_temperature() -> f64 {
    DEFAULT_TEMPERATURE
}

fn default_cache_mode() -> CacheMode {
    CacheMode::LiveRecord
}

fn default_replay_dir() -> PathBuf {
    PathBuf::from("replay")
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_concurrency() -> usize {
    4
}

fn default_evidence_retries() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Required; may be supplied on the command line instead.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<Strategy>,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_cache_mode")]
    pub cache_mode: CacheMode,
    #[serde(default = "default_replay_dir")]
    pub replay_dir: PathBuf,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default)]
    pub skip_stage2_on_none: bool,
    #[serde(default = "default_evidence_retries")]
    pub evidence_retries: u32,
    #[serde(default)]
    pub check_worthiness: bool,
    /// Number of ambiguous-corpus claims to sample; all when unset.
    #[serde(default)]
    pub sample_size: Option<usize>,
    #[serde(default)]
    pub inputs: InputsConfig,
    #[serde(default)]
    pub chat: ChatConfig,
    #[serde(default)]
    pub entailment: ScorerConfig,
    #[serde(default)]
    pub check: ScorerConfig,
    /// Directory relative paths resolve against. Not part of the file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut config: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.base_dir = base_dir.to_path_buf();
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        let base = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("`seed` is required (config file or --seed)".into()))
    }

    pub fn entailment_threshold(&self) -> f64 {
        self.entailment.threshold.unwrap_or(DEFAULT_ENTAILMENT_THRESHOLD)
    }

    pub fn check_threshold(&self) -> f64 {
        self.check.threshold.unwrap_or(DEFAULT_CHECK_THRESHOLD)
    }

    pub fn validate(&self) -> Result<()> {
        self.seed()?;
        if self.strategies.is_empty() {
            return Err(Error::Config("`strategies` must not be empty".into()));
        }
        if !(self.temperature >= 0.0) {
            return Err(Error::Config(format!("`temperature` must be >= 0, got {}", self.temperature)));
        }
        for (name, t) in [("entailment", self.entailment_threshold()), ("check", self.check_threshold())] {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::Config(format!("`{name}.threshold` must lie in [0, 1], got {t}")));
            }
        }
        if self.concurrency == 0 {
            return Err(Error::Config("`concurrency` must be at least 1".into()));
        }
        if self.entailment.kind == ScorerKind::Llm {
            return Err(Error::Config("`entailment.kind = \"llm\"` is not supported".into()));
        }
        if self.cache_mode == CacheMode::ReplayOnly {
            return Ok(());
        }
        match self.chat.kind {
            ChatKind::Http if self.chat.endpoint.is_none() => {
                return Err(Error::Config("`chat.endpoint` is required for live-record runs".into()))
            }
            ChatKind::Scripted if self.chat.transcript.is_none() => {
                return Err(Error::Config("`chat.transcript` is required for scripted chat".into()))
            }
            _ => {}
        }
        for (name, s) in [("entailment", &self.entailment), ("check", &self.check)] {
            match s.kind {
                ScorerKind::Http if s.endpoint.is_none() => {
                    return Err(Error::Config(format!("`{name}.endpoint` is required for live-record runs")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Hash of the canonical configuration. The output directory is left
    /// out so identical runs into different directories match.
    pub fn content_hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serializes");
        if let Some(obj) = value.as_object_mut() {
            obj.remove("output_dir");
        }
        hex::encode(Sha256::digest(value.to_string().as_bytes()))
    }
}
