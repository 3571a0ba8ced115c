//! Domain records shared by every pipeline stage.
//!
//! All records are plain immutable values once built. Each one maps to a
//! single JSON object per line in corpus and output files; field names are
//! the serialized names.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Collapse every whitespace run to one space and trim both ends.
pub fn normalize_text(raw: &str) -> String {
    raw.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Number of whitespace-delimited tokens.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Human or predicted support label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "SUPPORTED")]
    Supported,
    #[serde(rename = "NOT_SUPPORTED")]
    NotSupported,
}

impl Label {
    /// Lenient parse used at ingestion. Anything outside the two labels is `None`.
    pub fn parse_loose(raw: &str) -> Option<Label> {
        let key: String = raw
            .trim()
            .chars()
            .map(|c| if c == ' ' || c == '-' { '_' } else { c.to_ascii_uppercase() })
            .collect();
        match key.as_str() {
            "SUPPORTED" | "S" => Some(Label::Supported),
            "NOT_SUPPORTED" | "UNSUPPORTED" | "NS" => Some(Label::NotSupported),
            _ => None,
        }
    }

    pub fn from_bool(supported: bool) -> Label {
        if supported {
            Label::Supported
        } else {
            Label::NotSupported
        }
    }

    pub fn is_supported(self) -> bool {
        self == Label::Supported
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Supported => "SUPPORTED",
            Label::NotSupported => "NOT_SUPPORTED",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Claim revision strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Strategy {
    Atomic,
    Simple,
    Safe,
    Molecular,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [
        Strategy::Atomic,
        Strategy::Simple,
        Strategy::Safe,
        Strategy::Molecular,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Atomic => "ATOMIC",
            Strategy::Simple => "SIMPLE",
            Strategy::Safe => "SAFE",
            Strategy::Molecular => "MOLECULAR",
        }
    }

    /// Row label used in report tables.
    pub fn table_label(self) -> &'static str {
        match self {
            Strategy::Atomic => "ATOMIC",
            Strategy::Simple => "SIMPLE-DECONTEXT",
            Strategy::Safe => "SAFE-DECONTEXT",
            Strategy::Molecular => "MOLECULAR-DECONTEXT",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "ATOMIC" => Ok(Strategy::Atomic),
            "SIMPLE" | "SIMPLE-DECONTEXT" => Ok(Strategy::Simple),
            "SAFE" | "SAFE-DECONTEXT" => Ok(Strategy::Safe),
            "MOLECULAR" | "MOLECULAR-DECONTEXT" => Ok(Strategy::Molecular),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// Disambiguation criteria chosen for a claim's subject. Serialized as JSON
/// `null` for `None`, otherwise as the category string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum DisambiguationCriteria {
    #[default]
    None,
    Category(String),
}

impl DisambiguationCriteria {
    /// Interpret a model-provided value; "none", "null", "n/a" and blanks map to `None`.
    pub fn from_model_text(raw: &str) -> Self {
        let trimmed = raw.trim().trim_matches(|c| c == '\'' || c == '"' || c == '`').trim();
        match trimmed.to_ascii_lowercase().as_str() {
            "" | "none" | "null" | "n/a" | "no" => DisambiguationCriteria::None,
            _ => DisambiguationCriteria::Category(trimmed.to_string()),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, DisambiguationCriteria::None)
    }

    /// Text substituted into prompts.
    pub fn prompt_text(&self) -> &str {
        match self {
            DisambiguationCriteria::None => "None",
            DisambiguationCriteria::Category(c) => c,
        }
    }
}

impl Serialize for DisambiguationCriteria {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            DisambiguationCriteria::None => serializer.serialize_none(),
            DisambiguationCriteria::Category(c) => serializer.serialize_some(c),
        }
    }
}

impl<'de> Deserialize<'de> for DisambiguationCriteria {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = Option::<String>::deserialize(deserializer)?;
        Ok(match raw {
            None => DisambiguationCriteria::None,
            Some(c) if c.trim().is_empty() => DisambiguationCriteria::None,
            Some(c) => DisambiguationCriteria::Category(c),
        })
    }
}

/// A prompt and the long-form generation to be fact-checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResponse {
    pub response_id: String,
    pub prompt: String,
    pub text: String,
    #[serde(default)]
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomicClaim {
    pub claim_id: String,
    pub response_id: String,
    pub text: String,
    pub ordinal: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_label: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subject_hint: Option<String>,
}

impl AtomicClaim {
    /// Claim ids are a pure function of the response id and ordinal.
    pub fn make_id(response_id: &str, ordinal: usize) -> String {
        format!("{response_id}-c{ordinal:03}")
    }
}

/// A strategy-tagged rewrite of an atomic claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RevisedClaim {
    pub claim_id: String,
    pub strategy: Strategy,
    pub text: String,
    #[serde(default)]
    pub subject: Option<String>,
    #[serde(default)]
    pub criteria: DisambiguationCriteria,
    pub modified: bool,
    pub word_count: usize,
}

impl RevisedClaim {
    pub fn new(
        source: &AtomicClaim,
        strategy: Strategy,
        text: impl Into<String>,
        subject: Option<String>,
        criteria: DisambiguationCriteria,
    ) -> Self {
        let text = text.into();
        let modified = normalize_text(&text) != normalize_text(&source.text);
        RevisedClaim {
            claim_id: source.claim_id.clone(),
            strategy,
            word_count: word_count(&text),
            text,
            subject,
            criteria,
            modified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceDocument {
    pub doc_id: String,
    pub entity_id: String,
    pub text: String,
    #[serde(default)]
    pub is_gold_entity: bool,
    #[serde(default)]
    pub claim_scope: String,
}

/// Outcome of one `Check(evidence, claim)` call.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgment {
    pub claim_id: String,
    pub strategy: Strategy,
    pub doc_id: String,
    pub label: Label,
    pub score: f64,
    pub threshold: f64,
    pub provider_id: String,
}

impl Judgment {
    pub fn new(
        claim_id: impl Into<String>,
        strategy: Strategy,
        doc_id: impl Into<String>,
        score: f64,
        threshold: f64,
        provider_id: impl Into<String>,
    ) -> Self {
        Judgment {
            claim_id: claim_id.into(),
            strategy,
            doc_id: doc_id.into(),
            label: Label::from_bool(score >= threshold),
            score,
            threshold,
            provider_id: provider_id.into(),
        }
    }
}
