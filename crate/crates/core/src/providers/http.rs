//! Live HTTP providers.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Duration;

use serde::Deserialize;
use serde_json::{json, Value};
use tracing::warn;

use super::{ChatModel, CompletionRequest, PairScorer, ScoreKind};
use crate::error::{Error, Result};

static REQUESTS_SENT: AtomicUsize = AtomicUsize::new(0);

/// Number of HTTP requests issued by this process so far.
pub fn requests_sent() -> usize {
    REQUESTS_SENT.load(Ordering::SeqCst)
}

#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 4,
            base_delay: Duration::from_millis(500),
        }
    }
}

fn agent(timeout: Duration) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .build()
        .into()
}

fn retryable(err: &ureq::Error) -> bool {
    match err {
        ureq::Error::StatusCode(code) => *code == 429 || *code >= 500,
        ureq::Error::Io(_) | ureq::Error::Timeout(_) | ureq::Error::ConnectionFailed => true,
        _ => false,
    }
}

fn post_json(
    agent: &ureq::Agent,
    url: &str,
    token: Option<&str>,
    body: &Value,
    retry: &RetryPolicy,
) -> Result<Value> {
    let mut attempt = 0;
    loop {
        attempt += 1;
        REQUESTS_SENT.fetch_add(1, Ordering::SeqCst);
        let mut req = agent.post(url).header("Content-Type", "application/json");
        if let Some(token) = token {
            req = req.header("Authorization", &format!("Bearer {token}"));
        }
        match req.send_json(body) {
            Ok(mut resp) => {
                return resp
                    .body_mut()
                    .read_json::<Value>()
                    .map_err(|e| Error::MalformedResponse(format!("{url}: {e}")))
            }
            Err(e) if retryable(&e) && attempt < retry.max_attempts => {
                let delay = retry.base_delay * 2u32.pow(attempt - 1);
                warn!(%url, attempt, ?delay, error = %e, "retrying request");
                std::thread::sleep(delay);
            }
            Err(e) => return Err(Error::ProviderUnavailable(format!("{url}: {e}"))),
        }
    }
}

/// OpenAI-style `chat/completions` client.
pub struct HttpChat {
    endpoint: String,
    token: Option<String>,
    agent: ureq::Agent,
    retry: RetryPolicy,
}

impl HttpChat {
    /// `token_env` names the environment variable holding the bearer token.
    pub fn new(endpoint: impl Into<String>, token_env: Option<&str>) -> Result<Self> {
        let token = match token_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                Error::ProviderUnavailable(format!("environment variable {var} is not set"))
            })?),
            None => None,
        };
        Ok(HttpChat {
            endpoint: endpoint.into(),
            token,
            agent: agent(Duration::from_secs(120)),
            retry: RetryPolicy::default(),
        })
    }
}

#[derive(Deserialize)]
struct ChatReply {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    #[serde(default)]
    content: Option<String>,
}

impl ChatModel for HttpChat {
    fn complete(&self, req: &CompletionRequest) -> Result<String> {
        req.validate()?;
        let mut body = json!({
            "model": req.model_tag,
            "messages": [{ "role": "user", "content": req.rendered_prompt }],
            "temperature": req.temperature,
        });
        if let Some(seed) = req.seed {
            body["seed"] = json!(seed);
        }
        let raw = post_json(&self.agent, &self.endpoint, self.token.as_deref(), &body, &self.retry)?;
        let reply: ChatReply = serde_json::from_value(raw)
            .map_err(|e| Error::MalformedResponse(format!("chat reply: {e}")))?;
        let text = reply
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default();
        if text.trim().is_empty() {
            return Err(Error::MalformedResponse("empty chat completion".into()));
        }
        Ok(text)
    }
}

/// Remote scorer: posts `{premise, hypothesis}` or `{evidence, claim}` and
/// reads `{score}`.
pub struct HttpScorer {
    endpoint: String,
    kind: ScoreKind,
    token: Option<String>,
    agent: ureq::Agent,
    retry: RetryPolicy,
}

impl HttpScorer {
    pub fn new(endpoint: impl Into<String>, kind: ScoreKind, token_env: Option<&str>) -> Self {
        HttpScorer {
            endpoint: endpoint.into(),
            kind,
            token: token_env.and_then(|v| std::env::var(v).ok()),
            agent: agent(Duration::from_secs(60)),
            retry: RetryPolicy::default(),
        }
    }
}

impl PairScorer for HttpScorer {
    fn score(&self, first: &str, second: &str) -> Result<f64> {
        let body = match self.kind {
            ScoreKind::Entail => json!({ "premise": first, "hypothesis": second }),
            ScoreKind::Check => json!({ "evidence": first, "claim": second }),
        };
        let raw = post_json(&self.agent, &self.endpoint, self.token.as_deref(), &body, &self.retry)?;
        raw.get("score")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::MalformedResponse(format!("{}: reply has no numeric score", self.endpoint)))
    }
}
