//! Access to the three external model capabilities: chat completion,
//! pairwise entailment and evidence-conditioned checking.
//!
//! Every capability is a small `Send + Sync` trait so stages can fan requests
//! out across threads. Live HTTP clients, the replay store and the fixture
//! providers all implement the same traits and can be stacked.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Judgment, Label, Strategy};
use crate::templates::Vars;

pub mod fixture;
pub mod http;
pub mod llm;
pub mod replay;

pub use llm::{Llm, LlmCheckScorer};
pub use replay::{CacheMode, RecordedChat, RecordedScorer, ReplayStore, RequestKey, ScoreKind};

pub const DEFAULT_CHECK_THRESHOLD: f64 = 0.5;
pub const DEFAULT_ENTAILMENT_THRESHOLD: f64 = 0.5;
/// Sampling temperature used for every generation stage unless configured.
pub const DEFAULT_TEMPERATURE: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub template_id: String,
    pub rendered_prompt: String,
    pub temperature: f64,
    pub seed: Option<u64>,
    pub model_tag: String,
    /// Variables the prompt was rendered from. Not part of the request
    /// identity; scripted fixtures match on them.
    #[serde(skip)]
    pub vars: Vars,
    #[serde(skip)]
    pub attempt: u32,
}

impl CompletionRequest {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature >= 0.0) {
            return Err(Error::Config(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        if self.rendered_prompt.trim().is_empty() {
            return Err(Error::Template(format!(
                "rendered prompt for `{}` is empty",
                self.template_id
            )));
        }
        Ok(())
    }
}

pub trait ChatModel: Send + Sync {
    fn complete(&self, req: &CompletionRequest) -> Result<String>;
}

/// Scores an ordered text pair in `[0, 1]`. For entailment the pair is
/// (premise, hypothesis); for checking it is (evidence, claim).
pub trait PairScorer: Send + Sync {
    fn score(&self, first: &str, second: &str) -> Result<f64>;
}

impl<F> ChatModel for F
where
    F: Fn(&CompletionRequest) -> Result<String> + Send + Sync,
{
    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        self(req)
    }
}

impl<F> PairScorer for F
where
    F: Fn(&str, &str) -> Result<f64> + Send + Sync,
{
    fn score(&self, first: &str, second: &str) -> Result<f64> {
        self(first, second)
    }
}

impl<T: ChatModel + ?Sized> ChatModel for Arc<T> {
    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        (**self).complete(req)
    }
}

impl<T: PairScorer + ?Sized> PairScorer for Arc<T> {
    fn score(&self, first: &str, second: &str) -> Result<f64> {
        (**self).score(first, second)
    }
}

fn checked_score(score: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&score) {
        Ok(score)
    } else {
        Err(Error::MalformedResponse(format!("score {score} outside [0, 1]")))
    }
}

fn require_text(what: &str, text: &str) -> Result<()> {
    if text.trim().is_empty() {
        Err(Error::InvalidClaim(format!("{what} is empty")))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntailmentLabel {
    Supported,
    Unsupported,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntailmentResult {
    pub label: EntailmentLabel,
    pub score: f64,
}

impl EntailmentResult {
    pub fn is_supported(&self) -> bool {
        self.label == EntailmentLabel::Supported
    }
}

/// Thresholded entailment `e(premise, hypothesis)`.
#[derive(Clone)]
pub struct Entailer {
    scorer: Arc<dyn PairScorer>,
    threshold: f64,
}

impl Entailer {
    pub fn new(scorer: Arc<dyn PairScorer>, threshold: f64) -> Self {
        Entailer { scorer, threshold }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn entail(&self, premise: &str, hypothesis: &str) -> Result<EntailmentResult> {
        require_text("premise", premise)?;
        require_text("hypothesis", hypothesis)?;
        let score = checked_score(self.scorer.score(premise, hypothesis)?)?;
        let label = if score >= self.threshold {
            EntailmentLabel::Supported
        } else {
            EntailmentLabel::Unsupported
        };
        Ok(EntailmentResult { label, score })
    }

    pub fn supports(&self, premise: &str, hypothesis: &str) -> Result<bool> {
        Ok(self.entail(premise, hypothesis)?.is_supported())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub score: f64,
    pub label: Label,
}

/// Thresholded `Check(evidence, claim)`.
#[derive(Clone)]
pub struct Checker {
    scorer: Arc<dyn PairScorer>,
    threshold: f64,
    provider_id: String,
}

impl Checker {
    pub fn new(scorer: Arc<dyn PairScorer>, threshold: f64, provider_id: impl Into<String>) -> Self {
        Checker {
            scorer,
            threshold,
            provider_id: provider_id.into(),
        }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn provider_id(&self) -> &str {
        &self.provider_id
    }

    pub fn check(&self, evidence: &str, claim: &str) -> Result<CheckResult> {
        require_text("evidence", evidence)?;
        require_text("claim", claim)?;
        let score = checked_score(self.scorer.score(evidence, claim)?)?;
        Ok(CheckResult {
            score,
            label: Label::from_bool(score >= self.threshold),
        })
    }

    pub fn judge(
        &self,
        claim_id: &str,
        strategy: Strategy,
        doc_id: &str,
        evidence: &str,
        claim: &str,
    ) -> Result<Judgment> {
        let result = self.check(evidence, claim)?;
        Ok(Judgment::new(
            claim_id,
            strategy,
            doc_id,
            result.score,
            self.threshold,
            self.provider_id.clone(),
        ))
    }
}
