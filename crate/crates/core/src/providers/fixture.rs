//! Deterministic offline providers used to author replay transcripts and
//! drive tests.
//!
//! `ScriptedChat` answers from a list of authored replies matched on the
//! request's template and variables. `FixtureScorer` returns authored scores
//! for listed pairs and otherwise scores containment: 1.0 when the second
//! text (lower-cased, trailing punctuation dropped) occurs inside the first,
//! else 0.0.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use super::{ChatModel, CompletionRequest, PairScorer, ScoreKind};
use crate::error::{Error, Result};
use crate::model::normalize_text;

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    raw.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// One authored chat reply.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptedReply {
    pub template: String,
    /// Variables that must equal the request's (after whitespace normalization).
    #[serde(default, rename = "match")]
    pub matches: BTreeMap<String, String>,
    #[serde(default)]
    pub attempt: u32,
    /// Literal reply text.
    #[serde(default)]
    pub output: Option<String>,
    /// Reply with the value of this request variable instead.
    #[serde(default)]
    pub echo: Option<String>,
}

pub struct ScriptedChat {
    replies: Vec<ScriptedReply>,
}

impl ScriptedChat {
    pub fn new(replies: Vec<ScriptedReply>) -> Result<Self> {
        for r in &replies {
            if r.output.is_some() == r.echo.is_some() {
                return Err(Error::Config(format!(
                    "scripted reply for `{}` needs exactly one of output/echo",
                    r.template
                )));
            }
        }
        Ok(ScriptedChat { replies })
    }

    pub fn from_jsonl(path: &Path) -> Result<Self> {
        Self::new(read_jsonl(path)?)
    }
}

impl ChatModel for ScriptedChat {
    /// The most specific matching reply wins; ties are an authoring error.
    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        let candidates: Vec<&ScriptedReply> = self
            .replies
            .iter()
            .filter(|r| r.template == req.template_id && r.attempt == req.attempt)
            .filter(|r| {
                r.matches.iter().all(|(k, v)| {
                    req.vars
                        .get(k)
                        .is_some_and(|actual| normalize_text(actual) == normalize_text(v))
                })
            })
            .collect();
        let best = candidates.iter().map(|r| r.matches.len()).max().ok_or_else(|| {
            Error::ProviderUnavailable(format!(
                "no scripted reply for `{}` attempt {} with vars {:?}",
                req.template_id, req.attempt, req.vars
            ))
        })?;
        let winners: Vec<_> = candidates.into_iter().filter(|r| r.matches.len() == best).collect();
        if winners.len() > 1 {
            return Err(Error::Config(format!(
                "{} scripted replies tie for `{}` with vars {:?}",
                winners.len(),
                req.template_id,
                req.vars
            )));
        }
        let reply = winners[0];
        match (&reply.output, &reply.echo) {
            (Some(text), _) => Ok(text.clone()),
            (None, Some(var)) => req
                .vars
                .get(var)
                .cloned()
                .ok_or_else(|| Error::Config(format!("echo variable `{var}` not in request"))),
            (None, None) => unreachable!("validated in ScriptedChat::new"),
        }
    }
}

/// An authored score for one ordered pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub kind: ScoreKind,
    #[serde(alias = "premise", alias = "evidence")]
    pub first: String,
    #[serde(alias = "hypothesis", alias = "claim")]
    pub second: String,
    pub score: f64,
}

/// Lower-cased, whitespace-normalized text without trailing sentence punctuation.
pub fn comparable(text: &str) -> String {
    normalize_text(text)
        .trim_end_matches(['.', '!', '?'])
        .trim_end()
        .to_lowercase()
}

#[derive(Debug, Clone, Default)]
pub struct FixtureScorer {
    table: HashMap<(String, String), f64>,
}

impl FixtureScorer {
    pub fn new(entries: impl IntoIterator<Item = (String, String, f64)>) -> Self {
        FixtureScorer {
            table: entries
                .into_iter()
                .map(|(a, b, s)| ((normalize_text(&a), normalize_text(&b)), s))
                .collect(),
        }
    }

    pub fn containment_only() -> Self {
        Self::default()
    }

    /// Entailment and check scorers from one scores file.
    pub fn pair_from_jsonl(path: &Path) -> Result<(FixtureScorer, FixtureScorer)> {
        let entries: Vec<ScoreEntry> = read_jsonl(path)?;
        let split = |kind: ScoreKind| {
            FixtureScorer::new(
                entries
                    .iter()
                    .filter(|e| e.kind == kind)
                    .map(|e| (e.first.clone(), e.second.clone(), e.score)),
            )
        };
        Ok((split(ScoreKind::Entail), split(ScoreKind::Check)))
    }
}

impl PairScorer for FixtureScorer {
    fn score(&self, first: &str, second: &str) -> Result<f64> {
        if let Some(s) = self.table.get(&(normalize_text(first), normalize_text(second))) {
            return Ok(*s);
        }
        let needle = comparable(second);
        Ok(if !needle.is_empty() && comparable(first).contains(&needle) {
            1.0
        } else {
            0.0
        })
    }
}

/// Counts calls to an inner chat model.
pub struct CountingChat<C> {
    inner: C,
    calls: AtomicUsize,
}

impl<C> CountingChat<C> {
    pub fn new(inner: C) -> Self {
        CountingChat {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<C: ChatModel> ChatModel for CountingChat<C> {
    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.complete(req)
    }
}

/// Counts calls to an inner scorer.
pub struct CountingScorer<S> {
    inner: S,
    calls: AtomicUsize,
}

impl<S> CountingScorer<S> {
    pub fn new(inner: S) -> Self {
        CountingScorer {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl<S: PairScorer> PairScorer for CountingScorer<S> {
    fn score(&self, first: &str, second: &str) -> Result<f64> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.score(first, second)
    }
}
