//! Controlled minimality experiment.
//!
//! For each revised claim `d`:
//! 1. keep it when `d` entails its own atomic claim and at least one other
//!    claim of the same response (claims in a substring relation with another
//!    claim are not counted);
//! 2. sample one of those extra claims as the banned fact and take every other
//!    response claim, minus those entailing the banned fact, as key facts;
//! 3. generate an article supporting the keys but not the banned fact and
//!    drop the case if the article still supports it;
//! 4. check the article against the core claim, `d` and the banned fact.
//!
//! A case is auto non-minimal when the core claim is supported and neither `d`
//! nor the banned fact is. Rates are reported over the whole claim set.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tracing::{debug, info};

use crate::decontext::Reviser;
use crate::error::{Error, Result};
use crate::model::{AtomicClaim, ModelResponse, RevisedClaim, Strategy};
use crate::providers::fixture::comparable;
use crate::providers::{Checker, Entailer, Llm};
use crate::seed;
use crate::templates::{self, vars};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiFactRecord {
    pub decontext: RevisedClaim,
    pub core_claim: AtomicClaim,
    pub entailed_aux: Vec<AtomicClaim>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialEvidenceCase {
    pub record: MultiFactRecord,
    pub banned_fact: AtomicClaim,
    pub key_facts: Vec<AtomicClaim>,
    pub evidence_text: String,
    pub seed: u64,
}

impl PartialEvidenceCase {
    pub fn claim_id(&self) -> &str {
        &self.record.core_claim.claim_id
    }

    pub fn strategy(&self) -> Strategy {
        self.record.decontext.strategy
    }

    /// Structural invariants; the banned-fact check is enforced at generation.
    pub fn validate(&self) -> Result<()> {
        let id = self.claim_id();
        if !self
            .record
            .entailed_aux
            .iter()
            .any(|c| c.claim_id == self.banned_fact.claim_id)
        {
            return Err(Error::InvalidClaim(format!("{id}: banned fact is not an entailed auxiliary fact")));
        }
        if self.key_facts.iter().any(|k| k.claim_id == self.banned_fact.claim_id) {
            return Err(Error::InvalidClaim(format!("{id}: banned fact listed among key facts")));
        }
        if self.key_facts.is_empty() {
            return Err(Error::EmptyKeys { claim_id: id.to_string() });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityVerdict {
    pub claim_id: String,
    pub strategy: Strategy,
    pub core_supported: bool,
    pub decontext_supported: bool,
    pub banned_supported: bool,
    pub auto_nonminimal: bool,
}

impl MinimalityVerdict {
    pub fn new(
        claim_id: impl Into<String>,
        strategy: Strategy,
        core_supported: bool,
        decontext_supported: bool,
        banned_supported: bool,
    ) -> Self {
        MinimalityVerdict {
            claim_id: claim_id.into(),
            strategy,
            core_supported,
            decontext_supported,
            banned_supported,
            auto_nonminimal: core_supported && !decontext_supported && !banned_supported,
        }
    }
}

/// Ids of claims (other than `core`) that are a substring of, or contain,
/// some other claim of the response. Comparison is case-insensitive on
/// normalized text without trailing punctuation.
pub fn substring_excluded(core: &AtomicClaim, claims: &[AtomicClaim]) -> BTreeSet<String> {
    let forms: Vec<String> = claims.iter().map(|c| comparable(&c.text)).collect();
    let mut excluded = BTreeSet::new();
    for (i, a) in claims.iter().enumerate() {
        if a.claim_id == core.claim_id {
            continue;
        }
        let in_pair = forms.iter().enumerate().any(|(j, other)| {
            j != i && (other.contains(forms[i].as_str()) || forms[i].contains(other.as_str()))
        });
        if in_pair {
            excluded.insert(a.claim_id.clone());
        }
    }
    excluded
}

/// Claims that may count as auxiliary facts of `core`.
pub fn aux_candidates<'a>(core: &AtomicClaim, claims: &'a [AtomicClaim], substring_filter: bool) -> Vec<&'a AtomicClaim> {
    let excluded = if substring_filter {
        substring_excluded(core, claims)
    } else {
        BTreeSet::new()
    };
    claims
        .iter()
        .filter(|c| c.claim_id != core.claim_id && !excluded.contains(&c.claim_id))
        .collect()
}

pub fn find_multifact(
    entailer: &Entailer,
    decontext: &RevisedClaim,
    claims: &[AtomicClaim],
) -> Result<Option<MultiFactRecord>> {
    find_multifact_with(entailer, decontext, claims, true)
}

pub fn find_multifact_with(
    entailer: &Entailer,
    decontext: &RevisedClaim,
    claims: &[AtomicClaim],
    substring_filter: bool,
) -> Result<Option<MultiFactRecord>> {
    let core = claims
        .iter()
        .find(|c| c.claim_id == decontext.claim_id)
        .ok_or_else(|| {
            Error::InvalidClaim(format!("revision {} has no source among the claims", decontext.claim_id))
        })?;
    if !entailer.supports(&decontext.text, &core.text)? {
        return Ok(None);
    }
    let mut entailed_aux = Vec::new();
    for candidate in aux_candidates(core, claims, substring_filter) {
        if entailer.supports(&decontext.text, &candidate.text)? {
            entailed_aux.push(candidate.clone());
        }
    }
    if entailed_aux.is_empty() {
        return Ok(None);
    }
    Ok(Some(MultiFactRecord {
        decontext: decontext.clone(),
        core_claim: core.clone(),
        entailed_aux,
    }))
}

/// Key facts for `banned`: every other claim that does not entail it.
pub fn filter_key_facts(entailer: &Entailer, banned: &AtomicClaim, all_claims: &[AtomicClaim]) -> Result<Vec<AtomicClaim>> {
    let mut keys = Vec::new();
    for c in all_claims.iter().filter(|c| c.claim_id != banned.claim_id) {
        if !entailer.supports(&c.text, &banned.text)? {
            keys.push(c.clone());
        }
    }
    Ok(keys)
}

pub fn sample_banned_and_keys(
    entailer: &Entailer,
    record: &MultiFactRecord,
    all_claims: &[AtomicClaim],
    seed: u64,
) -> Result<(AtomicClaim, Vec<AtomicClaim>)> {
    if record.entailed_aux.is_empty() {
        return Err(Error::InvalidClaim(format!(
            "{}: record has no auxiliary facts",
            record.core_claim.claim_id
        )));
    }
    let index = seed::rng(seed).gen_range(0..record.entailed_aux.len());
    let banned = record.entailed_aux[index].clone();
    let keys = filter_key_facts(entailer, &banned, all_claims)?;
    if keys.is_empty() {
        return Err(Error::EmptyKeys {
            claim_id: record.core_claim.claim_id.clone(),
        });
    }
    Ok((banned, keys))
}

#[derive(Deserialize)]
struct Article {
    article: String,
}

pub struct EvidenceGenerator {
    llm: Llm,
    checker: Checker,
    retries: u32,
}

impl EvidenceGenerator {
    pub fn new(llm: Llm, checker: Checker, retries: u32) -> Self {
        EvidenceGenerator { llm, checker, retries }
    }

    /// An article stating `keys` that the checker does not judge to support
    /// `banned`. Retries use a stricter prompt.
    pub fn generate_partial_evidence(&self, keys: &[AtomicClaim], banned: &AtomicClaim) -> Result<String> {
        if keys.is_empty() {
            return Err(Error::InvalidClaim("evidence generation needs at least one key fact".into()));
        }
        let key_list = keys
            .iter()
            .map(|k| format!("- {}", k.text))
            .collect::<Vec<_>>()
            .join("\n");
        let v = vars([("key_facts", key_list.as_str()), ("banned_fact", banned.text.as_str())]);
        for attempt in 0..=self.retries {
            let template = if attempt == 0 {
                templates::EVIDENCE
            } else {
                templates::EVIDENCE_STRICT
            };
            let article: Article = self.llm.ask_json(template, &v)?;
            if article.article.trim().is_empty() {
                return Err(Error::MalformedResponse("generated article is empty".into()));
            }
            if !self.checker.check(&article.article, &banned.text)?.label.is_supported() {
                return Ok(article.article);
            }
            debug!(banned = %banned.claim_id, attempt, "generated evidence leaks the banned fact");
        }
        Err(Error::GenerationLeak {
            claim_id: banned.claim_id.clone(),
        })
    }
}

pub fn classify_case(checker: &Checker, case: &PartialEvidenceCase) -> Result<MinimalityVerdict> {
    let evidence = &case.evidence_text;
    let core = checker.check(evidence, &case.record.core_claim.text)?.label.is_supported();
    let decontext = checker.check(evidence, &case.record.decontext.text)?.label.is_supported();
    let banned = checker.check(evidence, &case.banned_fact.text)?.label.is_supported();
    Ok(MinimalityVerdict::new(case.claim_id(), case.strategy(), core, decontext, banned))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityRow {
    pub strategy: Strategy,
    pub potential_nonminimal: usize,
    pub auto_nonminimal: usize,
    pub potential_nonminimal_rate: f64,
    pub auto_nonminimal_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub corpus_size: usize,
    pub rows: Vec<MinimalityRow>,
}

/// Rates over the full claim set: every verdict is one potential
/// non-minimal case.
pub fn minimality_report(verdicts: &[MinimalityVerdict], strategies: &[Strategy], corpus_size: usize) -> MinimalityReport {
    let mut sorted: Vec<&MinimalityVerdict> = verdicts.iter().collect();
    sorted.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    let rate = |n: usize| if corpus_size == 0 { 0.0 } else { n as f64 / corpus_size as f64 };
    let rows = strategies
        .iter()
        .map(|&strategy| {
            let (potential, auto) = sorted
                .iter()
                .filter(|v| v.strategy == strategy)
                .fold((0, 0), |(p, a), v| (p + 1, a + usize::from(v.auto_nonminimal)));
            MinimalityRow {
                strategy,
                potential_nonminimal: potential,
                auto_nonminimal: auto,
                potential_nonminimal_rate: rate(potential),
                auto_nonminimal_rate: rate(auto),
            }
        })
        .collect();
    MinimalityReport { corpus_size, rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HumanMinimality {
    #[serde(rename = "minimal")]
    Minimal,
    #[serde(rename = "non-minimal")]
    NonMinimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityAnnotation {
    pub claim_id: String,
    pub strategy: Strategy,
    pub human_minimality_label: HumanMinimality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanMinimalityRow {
    pub strategy: Strategy,
    pub annotated: usize,
    pub unannotated: usize,
    pub minimal: usize,
    pub non_minimal: usize,
    pub minimal_rate: f64,
    pub non_minimal_rate: f64,
    /// Human non-minimal cases as a fraction of the full claim set.
    pub non_minimal_of_corpus: f64,
}

/// Human split of each strategy's auto non-minimal subset.
pub fn human_minimality_split(
    verdicts: &[MinimalityVerdict],
    annotations: &[MinimalityAnnotation],
    strategies: &[Strategy],
    corpus_size: usize,
) -> Vec<HumanMinimalityRow> {
    let labels: BTreeMap<(Strategy, &str), HumanMinimality> = annotations
        .iter()
        .map(|a| ((a.strategy, a.claim_id.as_str()), a.human_minimality_label))
        .collect();
    strategies
        .iter()
        .map(|&strategy| {
            let mut row = HumanMinimalityRow {
                strategy,
                annotated: 0,
                unannotated: 0,
                minimal: 0,
                non_minimal: 0,
                minimal_rate: 0.0,
                non_minimal_rate: 0.0,
                non_minimal_of_corpus: 0.0,
            };
            for v in verdicts.iter().filter(|v| v.strategy == strategy && v.auto_nonminimal) {
                match labels.get(&(strategy, v.claim_id.as_str())) {
                    Some(HumanMinimality::Minimal) => row.minimal += 1,
                    Some(HumanMinimality::NonMinimal) => row.non_minimal += 1,
                    None => row.unannotated += 1,
                }
            }
            row.annotated = row.minimal + row.non_minimal;
            if row.annotated > 0 {
                row.minimal_rate = row.minimal as f64 / row.annotated as f64;
                row.non_minimal_rate = row.non_minimal as f64 / row.annotated as f64;
            }
            if corpus_size > 0 {
                row.non_minimal_of_corpus = row.non_minimal as f64 / corpus_size as f64;
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropStats {
    pub single_fact: usize,
    pub empty_keys: usize,
    pub generation_leak: usize,
    pub malformed_generation: usize,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MinimalityOutcome {
    pub revisions: Vec<RevisedClaim>,
    pub records: usize,
    pub cases: Vec<PartialEvidenceCase>,
    pub verdicts: Vec<MinimalityVerdict>,
    pub drops: BTreeMap<Strategy, DropStats>,
}

enum CaseResult {
    SingleFact,
    Dropped(Error),
    Case(Box<PartialEvidenceCase>, MinimalityVerdict),
}

pub struct MinimalityExperiment {
    pub reviser: Reviser,
    pub entailer: Entailer,
    pub checker: Checker,
    pub evidence: EvidenceGenerator,
    pub run_seed: u64,
}

impl MinimalityExperiment {
    pub fn case_seed(&self, strategy: Strategy, claim_id: &str) -> u64 {
        seed::substream(self.run_seed, &format!("banned-fact/{strategy}/{claim_id}"))
    }

    fn run_claim(
        &self,
        strategy: Strategy,
        claim: &AtomicClaim,
        response: &ModelResponse,
        claims: &[AtomicClaim],
    ) -> Result<(RevisedClaim, CaseResult)> {
        let revision = self.reviser.revise(strategy, claim, response)?;
        let Some(record) = find_multifact(&self.entailer, &revision, claims)? else {
            return Ok((revision, CaseResult::SingleFact));
        };
        let case_seed = self.case_seed(strategy, &claim.claim_id);
        let (banned, keys) = match sample_banned_and_keys(&self.entailer, &record, claims, case_seed) {
            Ok(pair) => pair,
            Err(e @ Error::EmptyKeys { .. }) => return Ok((revision, CaseResult::Dropped(e))),
            Err(e) => return Err(e),
        };
        let evidence_text = match self.evidence.generate_partial_evidence(&keys, &banned) {
            Ok(text) => text,
            Err(e @ (Error::GenerationLeak { .. } | Error::MalformedResponse(_))) => {
                return Ok((revision, CaseResult::Dropped(e)))
            }
            Err(e) => return Err(e),
        };
        let case = PartialEvidenceCase {
            record,
            banned_fact: banned,
            key_facts: keys,
            evidence_text,
            seed: case_seed,
        };
        case.validate()?;
        let verdict = classify_case(&self.checker, &case)?;
        Ok((revision, CaseResult::Case(Box::new(case), verdict)))
    }

    /// Run every strategy over every claim. Results are ordered by strategy,
    /// then corpus order; arrival order does not matter.
    pub fn run(&self, corpus: &[(ModelResponse, Vec<AtomicClaim>)], strategies: &[Strategy]) -> Result<MinimalityOutcome> {
        let jobs: Vec<(Strategy, &ModelResponse, &[AtomicClaim], &AtomicClaim)> = strategies
            .iter()
            .flat_map(|&s| {
                corpus
                    .iter()
                    .flat_map(move |(r, cs)| cs.iter().map(move |c| (s, r, cs.as_slice(), c)))
            })
            .collect();
        let results: Vec<(Strategy, RevisedClaim, CaseResult)> = jobs
            .par_iter()
            .map(|(s, r, cs, c)| self.run_claim(*s, c, r, cs).map(|(rev, res)| (*s, rev, res)))
            .collect::<Result<_>>()?;

        let mut outcome = MinimalityOutcome::default();
        for &s in strategies {
            outcome.drops.insert(s, DropStats::default());
        }
        for (strategy, revision, result) in results {
            outcome.revisions.push(revision);
            let drops = outcome.drops.entry(strategy).or_default();
            match result {
                CaseResult::SingleFact => drops.single_fact += 1,
                CaseResult::Dropped(Error::EmptyKeys { .. }) => {
                    outcome.records += 1;
                    drops.empty_keys += 1
                }
                CaseResult::Dropped(Error::GenerationLeak { .. }) => {
                    outcome.records += 1;
                    drops.generation_leak += 1
                }
                CaseResult::Dropped(_) => {
                    outcome.records += 1;
                    drops.malformed_generation += 1
                }
                CaseResult::Case(case, verdict) => {
                    outcome.records += 1;
                    outcome.cases.push(*case);
                    outcome.verdicts.push(verdict);
                }
            }
        }
        for (strategy, drops) in &outcome.drops {
            info!(
                %strategy,
                empty_keys = drops.empty_keys,
                generation_leak = drops.generation_leak,
                malformed = drops.malformed_generation,
                "minimality cases dropped"
            );
        }
        Ok(outcome)
    }
}
