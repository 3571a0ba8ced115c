//! JSONL corpus readers.
//!
//! Fact-check corpus, one response per line:
//! `{"response_id", "prompt", "text", "source"?, "claims"?: [{"text", "human_label", "claim_id"?}]}`.
//! Records without `claims` are decomposed by the pipeline. Claims whose
//! label is not SUPPORTED / NOT_SUPPORTED are dropped and counted.
//!
//! Ambiguous-biography corpus, three files:
//! - responses `{"response_id", "prompt", "text", "switch_index"?}`
//! - claims `{"claim_id", "response_id", "text", "human_label", "gold_entity_id", "ordinal"?}`
//! - documents `{"doc_id", "entity_id", "text", "claim_scope"?, "is_gold_entity"?}`

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rand::seq::index;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use tracing::info;

use crate::ambigeval::{documents_for, AmbigClaim};
use crate::error::{Error, Result};
use crate::minimality::MinimalityAnnotation;
use crate::model::{AtomicClaim, EvidenceDocument, Label, ModelResponse};
use crate::seed;

struct Record<'a> {
    path: &'a Path,
    line: usize,
    fields: Map<String, Value>,
}

impl<'a> Record<'a> {
    fn schema(&self, field: &str, message: impl Into<String>) -> Error {
        Error::Schema {
            path: self.path.to_path_buf(),
            line: self.line,
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn get(&self, field: &str) -> Option<&Value> {
        self.fields.get(field).filter(|v| !v.is_null())
    }

    fn string(&self, field: &str) -> Result<String> {
        self.opt_string(field)?
            .ok_or_else(|| self.schema(field, "required field is missing"))
    }

    fn nonempty(&self, field: &str) -> Result<String> {
        let s = self.string(field)?;
        if s.trim().is_empty() {
            return Err(self.schema(field, "must not be empty"));
        }
        Ok(s)
    }

    fn opt_string(&self, field: &str) -> Result<Option<String>> {
        match self.get(field) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(Value::Number(n)) => Ok(Some(n.to_string())),
            Some(_) => Err(self.schema(field, "expected a string")),
        }
    }

    fn opt_usize(&self, field: &str) -> Result<Option<usize>> {
        match self.get(field) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(|n| Some(n as usize))
                .ok_or_else(|| self.schema(field, "expected a non-negative integer")),
        }
    }

    fn opt_bool(&self, field: &str) -> Result<Option<bool>> {
        match self.get(field) {
            None => Ok(None),
            Some(v) => v
                .as_bool()
                .map(Some)
                .ok_or_else(|| self.schema(field, "expected a boolean")),
        }
    }
}

fn read_records(path: &Path) -> Result<Vec<Record<'_>>> {
    let raw = std::fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut records = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parse = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        match serde_json::from_str::<Value>(line).map_err(|e| parse(e.to_string()))? {
            Value::Object(fields) => records.push(Record {
                path,
                line: i + 1,
                fields,
            }),
            _ => return Err(parse("expected a JSON object".into())),
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FactcheckCorpus {
    pub records: Vec<(ModelResponse, Vec<AtomicClaim>)>,
    /// Claims dropped for lacking a usable human label.
    pub dropped_claims: usize,
}

impl FactcheckCorpus {
    pub fn claim_count(&self) -> usize {
        self.records.iter().map(|(_, c)| c.len()).sum()
    }
}

pub fn ingest_factcheck_corpus(path: &Path) -> Result<FactcheckCorpus> {
    let mut corpus = FactcheckCorpus::default();
    let mut response_ids = BTreeSet::new();
    let mut claim_ids = BTreeSet::new();
    for rec in read_records(path)? {
        let response = ModelResponse {
            response_id: rec.nonempty("response_id")?,
            prompt: rec.string("prompt")?,
            text: rec.nonempty("text")?,
            source: rec.opt_string("source")?.unwrap_or_default(),
        };
        if !response_ids.insert(response.response_id.clone()) {
            return Err(rec.schema("response_id", format!("duplicate response id {}", response.response_id)));
        }
        let mut claims = Vec::new();
        if let Some(raw_claims) = rec.get("claims") {
            let items = raw_claims
                .as_array()
                .ok_or_else(|| rec.schema("claims", "expected an array"))?;
            for (j, item) in items.iter().enumerate() {
                let obj = item
                    .as_object()
                    .ok_or_else(|| rec.schema(&format!("claims[{j}]"), "expected an object"))?;
                let claim = Record {
                    path: rec.path,
                    line: rec.line,
                    fields: obj.clone(),
                };
                let text = claim
                    .nonempty("text")
                    .map_err(|_| rec.schema(&format!("claims[{j}].text"), "required field is missing"))?;
                let label = claim.opt_string("human_label")?.as_deref().and_then(Label::parse_loose);
                let Some(label) = label else {
                    corpus.dropped_claims += 1;
                    continue;
                };
                let ordinal = claims.len();
                let claim_id = claim
                    .opt_string("claim_id")?
                    .unwrap_or_else(|| AtomicClaim::make_id(&response.response_id, ordinal));
                if !claim_ids.insert(claim_id.clone()) {
                    return Err(rec.schema(&format!("claims[{j}].claim_id"), format!("duplicate claim id {claim_id}")));
                }
                claims.push(AtomicClaim {
                    claim_id,
                    response_id: response.response_id.clone(),
                    text,
                    ordinal,
                    human_label: Some(label),
                    subject_hint: None,
                });
            }
        }
        corpus.records.push((response, claims));
    }
    info!(
        path = %path.display(),
        responses = corpus.records.len(),
        claims = corpus.claim_count(),
        dropped = corpus.dropped_claims,
        "ingested fact-check corpus"
    );
    Ok(corpus)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmbigResponse {
    pub response: ModelResponse,
    /// Ordinal of the first claim drawn from a different same-named entity.
    pub switch_index: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AmbigCorpus {
    pub responses: Vec<AmbigResponse>,
    pub claims: Vec<AmbigClaim>,
    pub documents: Vec<EvidenceDocument>,
    pub dropped_claims: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbigPaths {
    pub responses: PathBuf,
    pub claims: PathBuf,
    pub documents: PathBuf,
}

impl AmbigCorpus {
    pub fn response(&self, response_id: &str) -> Option<&ModelResponse> {
        self.responses
            .iter()
            .map(|r| &r.response)
            .find(|r| r.response_id == response_id)
    }

    pub fn switch_indices(&self) -> BTreeMap<String, Option<usize>> {
        self.responses
            .iter()
            .map(|r| (r.response.response_id.clone(), r.switch_index))
            .collect()
    }

    /// Keep `n` claims chosen uniformly by the run seed, in corpus order.
    pub fn sample(&mut self, n: usize, run_seed: u64) {
        if n >= self.claims.len() {
            return;
        }
        let mut rng = seed::rng(seed::substream(run_seed, "corpus-sample"));
        let mut keep = index::sample(&mut rng, self.claims.len(), n).into_vec();
        keep.sort_unstable();
        let claims = std::mem::take(&mut self.claims);
        let mut keep = keep.into_iter().peekable();
        self.claims = claims
            .into_iter()
            .enumerate()
            .filter_map(|(i, c)| {
                if keep.peek() == Some(&i) {
                    keep.next();
                    Some(c)
                } else {
                    None
                }
            })
            .collect();
    }
}

pub fn ingest_ambig_corpus(paths: &AmbigPaths) -> Result<AmbigCorpus> {
    let mut corpus = AmbigCorpus::default();

    for rec in read_records(&paths.responses)? {
        let response_id = rec.nonempty("response_id")?;
        if corpus.response(&response_id).is_some() {
            return Err(rec.schema("response_id", format!("duplicate response id {response_id}")));
        }
        corpus.responses.push(AmbigResponse {
            response: ModelResponse {
                response_id,
                prompt: rec.string("prompt")?,
                text: rec.nonempty("text")?,
                source: rec.opt_string("source")?.unwrap_or_default(),
            },
            switch_index: rec.opt_usize("switch_index")?,
        });
    }

    let mut doc_ids = BTreeSet::new();
    for rec in read_records(&paths.documents)? {
        let doc = EvidenceDocument {
            doc_id: rec.nonempty("doc_id")?,
            entity_id: rec.nonempty("entity_id")?,
            text: rec.nonempty("text")?,
            is_gold_entity: rec.opt_bool("is_gold_entity")?.unwrap_or(false),
            claim_scope: rec.opt_string("claim_scope")?.unwrap_or_default(),
        };
        if !doc_ids.insert(doc.doc_id.clone()) {
            return Err(rec.schema("doc_id", format!("duplicate document id {}", doc.doc_id)));
        }
        corpus.documents.push(doc);
    }

    let mut next_ordinal: BTreeMap<String, usize> = BTreeMap::new();
    let mut claim_ids = BTreeSet::new();
    for rec in read_records(&paths.claims)? {
        let claim_id = rec.nonempty("claim_id")?;
        let response_id = rec.nonempty("response_id")?;
        let text = rec.nonempty("text")?;
        let gold_entity_id = match rec.get("gold_entity_id") {
            Some(Value::Array(items)) if items.len() == 1 => items[0]
                .as_str()
                .map(str::to_string)
                .ok_or_else(|| rec.schema("gold_entity_id", "expected a string"))?,
            Some(Value::Array(items)) => {
                return Err(rec.schema("gold_entity_id", format!("expected one gold entity, found {}", items.len())))
            }
            _ => rec.nonempty("gold_entity_id")?,
        };
        if !claim_ids.insert(claim_id.clone()) {
            return Err(rec.schema("claim_id", format!("duplicate claim id {claim_id}; each claim has one gold entity")));
        }
        if corpus.response(&response_id).is_none() {
            return Err(rec.schema("response_id", format!("unknown response {response_id}")));
        }
        let counter = next_ordinal.entry(response_id.clone()).or_default();
        let ordinal = rec.opt_usize("ordinal")?.unwrap_or(*counter);
        *counter = ordinal + 1;
        let Some(human_label) = rec.opt_string("human_label")?.as_deref().and_then(Label::parse_loose) else {
            corpus.dropped_claims += 1;
            continue;
        };
        let claim = AmbigClaim {
            claim_id,
            response_id,
            ordinal,
            text,
            human_label,
            gold_entity_id,
        };
        let docs = documents_for(&claim, &corpus.documents);
        if docs.is_empty() {
            return Err(rec.schema("claim_id", "no evidence documents in scope"));
        }
        if !docs.iter().any(|d| d.entity_id == claim.gold_entity_id) {
            return Err(rec.schema(
                "gold_entity_id",
                format!("gold entity {} has no document in scope", claim.gold_entity_id),
            ));
        }
        let flagged: BTreeSet<&str> = corpus
            .documents
            .iter()
            .filter(|d| d.is_gold_entity)
            .filter(|d| docs.iter().any(|s| s.doc_id == d.doc_id))
            .map(|d| d.entity_id.as_str())
            .collect();
        if flagged.len() > 1 || flagged.iter().any(|e| *e != claim.gold_entity_id) {
            return Err(rec.schema(
                "gold_entity_id",
                format!("documents in scope flag gold entities {flagged:?}, claim says {}", claim.gold_entity_id),
            ));
        }
        corpus.claims.push(claim);
    }
    info!(
        responses = corpus.responses.len(),
        claims = corpus.claims.len(),
        documents = corpus.documents.len(),
        dropped = corpus.dropped_claims,
        "ingested ambiguous corpus"
    );
    Ok(corpus)
}

/// Human minimality labels, one `{"claim_id", "strategy", "human_minimality_label"}` per line.
pub fn ingest_minimality_annotations(path: &Path) -> Result<Vec<MinimalityAnnotation>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for rec in read_records(path)? {
        for field in ["claim_id", "strategy", "human_minimality_label"] {
            if rec.get(field).is_none() {
                return Err(rec.schema(field, "required field is missing"));
            }
        }
        let annotation: MinimalityAnnotation = serde_json::from_value(Value::Object(rec.fields.clone()))
            .map_err(|e| rec.schema("human_minimality_label", e.to_string()))?;
        if !seen.insert((annotation.strategy, annotation.claim_id.clone())) {
            return Err(rec.schema("claim_id", format!("duplicate annotation for {}", annotation.claim_id)));
        }
        out.push(annotation);
    }
    Ok(out)
}
