use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use tracing::debug;

use super::{ChatModel, CompletionRequest, PairScorer};
use crate::error::{Error, Result};
use crate::parse::extract_json_object;
use crate::templates::{self, Templates, Vars};

/// Template-driven access to a chat model with the run's sampling settings.
#[derive(Clone)]
pub struct Llm {
    chat: Arc<dyn ChatModel>,
    templates: Arc<Templates>,
    model_tag: String,
    temperature: f64,
    seed: Option<u64>,
}

impl Llm {
    pub fn new(
        chat: Arc<dyn ChatModel>,
        templates: Arc<Templates>,
        model_tag: impl Into<String>,
        temperature: f64,
        seed: Option<u64>,
    ) -> Self {
        Llm {
            chat,
            templates,
            model_tag: model_tag.into(),
            temperature,
            seed,
        }
    }

    /// Same chat backend and settings under a different model tag.
    pub fn with_model(&self, model_tag: impl Into<String>) -> Self {
        Llm {
            model_tag: model_tag.into(),
            ..self.clone()
        }
    }

    pub fn templates(&self) -> &Templates {
        &self.templates
    }

    pub fn request(&self, template_id: &str, vars: &Vars, attempt: u32) -> Result<CompletionRequest> {
        Ok(CompletionRequest {
            template_id: template_id.to_string(),
            rendered_prompt: self.templates.render_attempt(template_id, vars, attempt)?,
            temperature: self.temperature,
            seed: self.seed,
            model_tag: self.model_tag.clone(),
            vars: vars.clone(),
            attempt,
        })
    }

    /// Raw completion text for a template. Empty replies are `MalformedResponse`.
    pub fn ask(&self, template_id: &str, vars: &Vars) -> Result<String> {
        let text = self.chat.complete(&self.request(template_id, vars, 0)?)?;
        if text.trim().is_empty() {
            return Err(Error::MalformedResponse(format!("empty completion for `{template_id}`")));
        }
        Ok(text)
    }

    /// Structured completion: the reply must contain a JSON object that
    /// deserializes into `T`. One reprompt on failure, then `MalformedResponse`.
    pub fn ask_json<T: DeserializeOwned>(&self, template_id: &str, vars: &Vars) -> Result<T> {
        let mut last_problem = String::new();
        for attempt in 0..2 {
            let text = match self.chat.complete(&self.request(template_id, vars, attempt)?) {
                Ok(text) => text,
                Err(Error::MalformedResponse(msg)) => {
                    last_problem = msg;
                    continue;
                }
                Err(other) => return Err(other),
            };
            match extract_json_object(&text).map(serde_json::from_str::<T>) {
                Some(Ok(value)) => return Ok(value),
                Some(Err(e)) => last_problem = e.to_string(),
                None => last_problem = "no JSON object in reply".to_string(),
            }
            debug!(template_id, attempt, problem = %last_problem, "structured reply did not parse");
        }
        Err(Error::MalformedResponse(format!(
            "`{template_id}` reply unparseable after retry: {last_problem}"
        )))
    }
}

/// A `Check()` backend that asks a chat model for a SUPPORTED/NOT_SUPPORTED
/// verdict and maps it to a score of 1.0 or 0.0. The prompt is the
/// `llm_check` template shipped with this crate.
pub struct LlmCheckScorer {
    llm: Llm,
}

impl LlmCheckScorer {
    pub fn new(llm: Llm) -> Self {
        LlmCheckScorer { llm }
    }
}

#[derive(Deserialize)]
struct Verdict {
    label: String,
}

impl PairScorer for LlmCheckScorer {
    fn score(&self, evidence: &str, claim: &str) -> Result<f64> {
        let vars = templates::vars([("evidence", evidence), ("claim", claim)]);
        let verdict: Verdict = self.llm.ask_json(templates::LLM_CHECK, &vars)?;
        match crate::model::Label::parse_loose(&verdict.label) {
            Some(label) => Ok(if label.is_supported() { 1.0 } else { 0.0 }),
            None => Err(Error::MalformedResponse(format!("unknown check label `{}`", verdict.label))),
        }
    }
}
