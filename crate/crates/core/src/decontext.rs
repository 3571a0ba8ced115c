//! Claim revision strategies: the ATOMIC identity baseline, two single-prompt
//! decontextualization baselines, and two-stage molecular revision.
//!
//! Molecular revision first asks the model for the claim's main subject and
//! a disambiguation criteria (or `None` when the name is unambiguous), then
//! rewrites the claim using that criteria and the source response.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AtomicClaim, DisambiguationCriteria, ModelResponse, RevisedClaim, Strategy};
use crate::parse::extract_statement;
use crate::providers::Llm;
use crate::templates::{self, vars};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbiguityFinding {
    pub subject: String,
    pub criteria: DisambiguationCriteria,
    pub rationale: String,
}

#[derive(Deserialize)]
struct RawFinding {
    subject: String,
    #[serde(default)]
    criteria: Option<serde_json::Value>,
    #[serde(default)]
    rationale: Option<String>,
}

fn require_claim(claim: &AtomicClaim) -> Result<()> {
    if claim.text.trim().is_empty() {
        return Err(Error::InvalidClaim(format!("claim {} has empty text", claim.claim_id)));
    }
    Ok(())
}

fn require_membership(claim: &AtomicClaim, response: &ModelResponse) -> Result<()> {
    if claim.response_id != response.response_id {
        return Err(Error::InvalidClaim(format!(
            "claim {} belongs to response {}, not {}",
            claim.claim_id, claim.response_id, response.response_id
        )));
    }
    Ok(())
}

fn revision_text(reply: &str, template_id: &str) -> Result<String> {
    let text = extract_statement(reply);
    if text.is_empty() {
        return Err(Error::MalformedResponse(format!("no statement in `{template_id}` reply")));
    }
    Ok(text)
}

pub fn atomic_passthrough(claim: &AtomicClaim) -> Result<RevisedClaim> {
    require_claim(claim)?;
    Ok(RevisedClaim::new(
        claim,
        Strategy::Atomic,
        claim.text.clone(),
        None,
        DisambiguationCriteria::None,
    ))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviseOptions {
    /// Skip the second molecular stage when no disambiguation is needed and
    /// keep the atomic text.
    pub skip_stage2_on_none: bool,
}

#[derive(Clone)]
pub struct Reviser {
    llm: Llm,
    options: ReviseOptions,
}

impl Reviser {
    pub fn new(llm: Llm, options: ReviseOptions) -> Self {
        Reviser { llm, options }
    }

    pub fn revise(&self, strategy: Strategy, claim: &AtomicClaim, response: &ModelResponse) -> Result<RevisedClaim> {
        match strategy {
            Strategy::Atomic => atomic_passthrough(claim),
            Strategy::Simple => self.simple_decontext(claim, response),
            Strategy::Safe => self.safe_decontext(claim, response),
            Strategy::Molecular => self.molecular_decontext(claim, response),
        }
    }

    fn single_prompt(
        &self,
        strategy: Strategy,
        template_id: &str,
        claim: &AtomicClaim,
        response: &ModelResponse,
    ) -> Result<RevisedClaim> {
        require_claim(claim)?;
        require_membership(claim, response)?;
        let v = vars([("claim", claim.text.as_str()), ("response", response.text.as_str())]);
        let reply = self.llm.ask(template_id, &v)?;
        let text = revision_text(&reply, template_id)?;
        Ok(RevisedClaim::new(claim, strategy, text, None, DisambiguationCriteria::None))
    }

    pub fn simple_decontext(&self, claim: &AtomicClaim, response: &ModelResponse) -> Result<RevisedClaim> {
        self.single_prompt(Strategy::Simple, templates::SIMPLE_DECONTEXT, claim, response)
    }

    pub fn safe_decontext(&self, claim: &AtomicClaim, response: &ModelResponse) -> Result<RevisedClaim> {
        self.single_prompt(Strategy::Safe, templates::SAFE_REVISION, claim, response)
    }

    /// Stage 1: main subject and disambiguation criteria.
    pub fn identify_ambiguity(&self, claim: &AtomicClaim, response: &ModelResponse) -> Result<AmbiguityFinding> {
        require_claim(claim)?;
        let v = vars([("claim", claim.text.as_str()), ("response", response.text.as_str())]);
        let raw: RawFinding = self.llm.ask_json(templates::AMBIGUITY, &v)?;
        let subject = raw.subject.trim().to_string();
        if subject.is_empty() {
            return Err(Error::MalformedResponse(format!(
                "ambiguity reply for {} has an empty subject",
                claim.claim_id
            )));
        }
        let criteria = match raw.criteria {
            None | Some(serde_json::Value::Null) => DisambiguationCriteria::None,
            Some(serde_json::Value::String(s)) => DisambiguationCriteria::from_model_text(&s),
            Some(other) => {
                return Err(Error::MalformedResponse(format!("criteria must be a string, got {other}")))
            }
        };
        Ok(AmbiguityFinding {
            subject,
            criteria,
            rationale: raw.rationale.unwrap_or_default(),
        })
    }

    /// Stage 2: rewrite the claim using the finding and the response.
    pub fn generate_molecular(
        &self,
        claim: &AtomicClaim,
        response: &ModelResponse,
        finding: &AmbiguityFinding,
    ) -> Result<RevisedClaim> {
        require_claim(claim)?;
        require_membership(claim, response)?;
        let v = vars([
            ("claim", claim.text.as_str()),
            ("response", response.text.as_str()),
            ("subject", finding.subject.as_str()),
            ("criteria", finding.criteria.prompt_text()),
        ]);
        let reply = self.llm.ask(templates::MOLECULAR, &v)?;
        let text = revision_text(&reply, templates::MOLECULAR)?;
        Ok(RevisedClaim::new(
            claim,
            Strategy::Molecular,
            text,
            Some(finding.subject.clone()),
            finding.criteria.clone(),
        ))
    }

    pub fn molecular_decontext(&self, claim: &AtomicClaim, response: &ModelResponse) -> Result<RevisedClaim> {
        require_membership(claim, response)?;
        let finding = self.identify_ambiguity(claim, response)?;
        if self.options.skip_stage2_on_none && finding.criteria.is_none() {
            return Ok(RevisedClaim::new(
                claim,
                Strategy::Molecular,
                claim.text.clone(),
                Some(finding.subject),
                DisambiguationCriteria::None,
            ));
        }
        self.generate_molecular(claim, response, &finding)
    }
}

/// Fraction of revisions whose text differs from the source claim.
pub fn modification_rate(revisions: &[RevisedClaim]) -> f64 {
    if revisions.is_empty() {
        return 0.0;
    }
    revisions.iter().filter(|r| r.modified).count() as f64 / revisions.len() as f64
}
