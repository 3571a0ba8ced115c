//! Evaluation on biographies of entities that share a name.
//!
//! Every revised claim is checked against each evidence document in its
//! ambiguous set. The prediction is SUPPORTED when any document supports the
//! claim. A SUPPORTED prediction is only correct when the supporting
//! documents all belong to the gold entity, so the four error categories
//! partition the incorrect evaluations.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AtomicClaim, EvidenceDocument, Judgment, Label, RevisedClaim, Strategy};
use crate::providers::{Checker, Entailer};

/// A claim from the ambiguous-biography corpus with its human annotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbigClaim {
    pub claim_id: String,
    pub response_id: String,
    pub ordinal: usize,
    pub text: String,
    pub human_label: Label,
    pub gold_entity_id: String,
}

impl AmbigClaim {
    pub fn atomic(&self) -> AtomicClaim {
        AtomicClaim {
            claim_id: self.claim_id.clone(),
            response_id: self.response_id.clone(),
            text: self.text.clone(),
            ordinal: self.ordinal,
            human_label: Some(self.human_label),
            subject_hint: None,
        }
    }
}

/// Documents in `claim`'s ambiguous set: unscoped documents and those scoped
/// to its response or to the claim itself, with the gold flag set.
pub fn documents_for(claim: &AmbigClaim, docs: &[EvidenceDocument]) -> Vec<EvidenceDocument> {
    docs.iter()
        .filter(|d| d.claim_scope.is_empty() || d.claim_scope == claim.response_id || d.claim_scope == claim.claim_id)
        .map(|d| EvidenceDocument {
            is_gold_entity: d.entity_id == claim.gold_entity_id,
            ..d.clone()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCategory {
    MultiEvidenceMatched,
    SingleEvidenceWrongEntity,
    NoEvidenceMatched,
    FalseSupport,
}

impl ErrorCategory {
    pub const ALL: [ErrorCategory; 4] = [
        ErrorCategory::MultiEvidenceMatched,
        ErrorCategory::SingleEvidenceWrongEntity,
        ErrorCategory::NoEvidenceMatched,
        ErrorCategory::FalseSupport,
    ];

    /// Category of an evaluation from its labels and supporting entities;
    /// `None` means the evaluation is correct.
    pub fn classify(human: Label, supporting_entities: &BTreeSet<String>, gold_entity_id: &str) -> Option<ErrorCategory> {
        match (human, supporting_entities.len()) {
            (Label::Supported, 0) => Some(ErrorCategory::NoEvidenceMatched),
            (Label::Supported, 1) if supporting_entities.contains(gold_entity_id) => None,
            (Label::Supported, 1) => Some(ErrorCategory::SingleEvidenceWrongEntity),
            (Label::Supported, _) => Some(ErrorCategory::MultiEvidenceMatched),
            (Label::NotSupported, 0) => None,
            (Label::NotSupported, _) => Some(ErrorCategory::FalseSupport),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimEvaluation {
    pub claim_id: String,
    pub response_id: String,
    pub ordinal: usize,
    pub strategy: Strategy,
    pub judgments: Vec<Judgment>,
    pub human_label: Label,
    pub gold_entity_id: String,
    pub predicted_label: Label,
    pub supporting_entities: BTreeSet<String>,
    pub correct: bool,
    pub error: Option<ErrorCategory>,
    pub word_count: usize,
    pub modified: bool,
}

impl ClaimEvaluation {
    /// Aggregate per-document judgments. `entity_of` maps doc ids to entities.
    pub fn from_judgments(
        claim: &AmbigClaim,
        revision: &RevisedClaim,
        judgments: Vec<Judgment>,
        entity_of: &BTreeMap<&str, &str>,
    ) -> Result<Self> {
        let mut supporting_entities = BTreeSet::new();
        for j in judgments.iter().filter(|j| j.label.is_supported()) {
            let entity = entity_of
                .get(j.doc_id.as_str())
                .ok_or_else(|| Error::InvalidClaim(format!("judgment on unknown document {}", j.doc_id)))?;
            supporting_entities.insert(entity.to_string());
        }
        let error = ErrorCategory::classify(claim.human_label, &supporting_entities, &claim.gold_entity_id);
        Ok(ClaimEvaluation {
            claim_id: claim.claim_id.clone(),
            response_id: claim.response_id.clone(),
            ordinal: claim.ordinal,
            strategy: revision.strategy,
            predicted_label: Label::from_bool(!supporting_entities.is_empty()),
            judgments,
            human_label: claim.human_label,
            gold_entity_id: claim.gold_entity_id.clone(),
            supporting_entities,
            correct: error.is_none(),
            error,
            word_count: revision.word_count,
            modified: revision.modified,
        })
    }
}

/// Check `revision` against every document; one check call per document.
pub fn judge_claim(
    checker: &Checker,
    claim: &AmbigClaim,
    revision: &RevisedClaim,
    docs: &[EvidenceDocument],
) -> Result<ClaimEvaluation> {
    if docs.is_empty() {
        return Err(Error::InvalidClaim(format!("{} has no evidence documents", claim.claim_id)));
    }
    if revision.claim_id != claim.claim_id {
        return Err(Error::InvalidClaim(format!(
            "revision {} does not belong to claim {}",
            revision.claim_id, claim.claim_id
        )));
    }
    if let Some(d) = docs.iter().find(|d| d.is_gold_entity && d.entity_id != claim.gold_entity_id) {
        return Err(Error::InvalidClaim(format!(
            "{}: document {} is flagged gold for entity {} but the gold entity is {}",
            claim.claim_id, d.doc_id, d.entity_id, claim.gold_entity_id
        )));
    }
    let judgments = docs
        .iter()
        .map(|d| checker.judge(&claim.claim_id, revision.strategy, &d.doc_id, &d.text, &revision.text))
        .collect::<Result<Vec<_>>>()?;
    let entity_of = docs.iter().map(|d| (d.doc_id.as_str(), d.entity_id.as_str())).collect();
    ClaimEvaluation::from_judgments(claim, revision, judgments, &entity_of)
}

/// Judge every revision concurrently. The result is ordered by strategy,
/// then claim id.
pub fn evaluate_all(
    checker: &Checker,
    claims: &[AmbigClaim],
    revisions: &[RevisedClaim],
    docs: &[EvidenceDocument],
) -> Result<Vec<ClaimEvaluation>> {
    let by_id: BTreeMap<&str, &AmbigClaim> = claims.iter().map(|c| (c.claim_id.as_str(), c)).collect();
    let mut evaluations = revisions
        .par_iter()
        .map(|rev| {
            let claim = by_id
                .get(rev.claim_id.as_str())
                .ok_or_else(|| Error::InvalidClaim(format!("revision for unknown claim {}", rev.claim_id)))?;
            judge_claim(checker, claim, rev, &documents_for(claim, docs))
        })
        .collect::<Result<Vec<_>>>()?;
    evaluations.sort_by(|a, b| (a.strategy, &a.claim_id).cmp(&(b.strategy, &b.claim_id)));
    Ok(evaluations)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn for_strategy(evaluations: &[ClaimEvaluation], strategy: Strategy) -> Vec<&ClaimEvaluation> {
    let mut subset: Vec<&ClaimEvaluation> = evaluations.iter().filter(|e| e.strategy == strategy).collect();
    subset.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    subset
}

/// Population mean and standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub strategy: Strategy,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub n_supported: usize,
    pub correct_supported: usize,
    pub accuracy_supported: f64,
    pub n_not_supported: usize,
    pub correct_not_supported: usize,
    pub accuracy_not_supported: f64,
    /// Not reported for ATOMIC, which never rewrites.
    pub modification_rate: Option<f64>,
    pub length_mean: f64,
    pub length_std: f64,
}

pub fn accuracy_report(evaluations: &[ClaimEvaluation], strategies: &[Strategy]) -> Vec<AccuracyRow> {
    strategies
        .iter()
        .map(|&strategy| {
            let subset = for_strategy(evaluations, strategy);
            let count = |f: &dyn Fn(&ClaimEvaluation) -> bool| subset.iter().filter(|e| f(e)).count();
            let n = subset.len();
            let correct = count(&|e| e.correct);
            let n_supported = count(&|e| e.human_label == Label::Supported);
            let correct_supported = count(&|e| e.correct && e.human_label == Label::Supported);
            let n_not_supported = n - n_supported;
            let correct_not_supported = correct - correct_supported;
            let lengths: Vec<f64> = subset.iter().map(|e| e.word_count as f64).collect();
            let (length_mean, length_std) = mean_std(&lengths);
            AccuracyRow {
                strategy,
                n,
                correct,
                accuracy: ratio(correct, n),
                n_supported,
                correct_supported,
                accuracy_supported: ratio(correct_supported, n_supported),
                n_not_supported,
                correct_not_supported,
                accuracy_not_supported: ratio(correct_not_supported, n_not_supported),
                modification_rate: (strategy != Strategy::Atomic).then(|| ratio(count(&|e| e.modified), n)),
                length_mean,
                length_std,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub strategy: Strategy,
    pub n: usize,
    pub counts: BTreeMap<ErrorCategory, usize>,
    pub rates: BTreeMap<ErrorCategory, f64>,
    pub errors: usize,
    pub error_rate: f64,
}

impl ErrorRow {
    pub fn rate(&self, category: ErrorCategory) -> f64 {
        self.rates.get(&category).copied().unwrap_or(0.0)
    }
}

/// Error categories as fractions of each strategy's full evaluation set.
/// Fails if the categories do not account for exactly the incorrect
/// evaluations.
pub fn error_breakdown(evaluations: &[ClaimEvaluation], strategies: &[Strategy]) -> Result<Vec<ErrorRow>> {
    strategies
        .iter()
        .map(|&strategy| {
            let subset = for_strategy(evaluations, strategy);
            let n = subset.len();
            let mut counts: BTreeMap<ErrorCategory, usize> = ErrorCategory::ALL.iter().map(|c| (*c, 0)).collect();
            for e in &subset {
                if let Some(c) = e.error {
                    *counts.entry(c).or_default() += 1;
                }
            }
            let errors: usize = counts.values().sum();
            let incorrect = subset.iter().filter(|e| !e.correct).count();
            if errors != incorrect {
                return Err(Error::Invariant(format!(
                    "{strategy}: {errors} categorized errors but {incorrect} incorrect evaluations"
                )));
            }
            Ok(ErrorRow {
                strategy,
                n,
                rates: counts.iter().map(|(c, k)| (*c, ratio(*k, n))).collect(),
                counts,
                errors,
                error_rate: ratio(errors, n),
            })
        })
        .collect()
}

/// Strategy pairs in the order of the overlap table.
pub const OVERLAP_PAIRS: [(Strategy, Strategy); 6] = [
    (Strategy::Atomic, Strategy::Simple),
    (Strategy::Atomic, Strategy::Safe),
    (Strategy::Atomic, Strategy::Molecular),
    (Strategy::Simple, Strategy::Safe),
    (Strategy::Simple, Strategy::Molecular),
    (Strategy::Molecular, Strategy::Safe),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub first: Strategy,
    pub second: Strategy,
    pub n: usize,
    pub equivalent: usize,
    pub overlap: f64,
}

/// Fraction of claims whose two revisions entail each other.
pub fn information_overlap(entailer: &Entailer, first: &[RevisedClaim], second: &[RevisedClaim]) -> Result<OverlapRow> {
    let strategy_of = |revs: &[RevisedClaim]| -> Result<Strategy> {
        let s = revs
            .first()
            .map(|r| r.strategy)
            .ok_or_else(|| Error::InvalidClaim("overlap needs at least one revision per side".into()))?;
        if revs.iter().any(|r| r.strategy != s) {
            return Err(Error::InvalidClaim("overlap inputs mix strategies".into()));
        }
        Ok(s)
    };
    let (sa, sb) = (strategy_of(first)?, strategy_of(second)?);
    let a: BTreeMap<&str, &RevisedClaim> = first.iter().map(|r| (r.claim_id.as_str(), r)).collect();
    let b: BTreeMap<&str, &RevisedClaim> = second.iter().map(|r| (r.claim_id.as_str(), r)).collect();
    if a.len() != first.len() || b.len() != second.len() || !a.keys().eq(b.keys()) {
        return Err(Error::InvalidClaim(format!(
            "{sa} and {sb} revisions are not aligned on claim ids"
        )));
    }
    let pairs: Vec<(&RevisedClaim, &RevisedClaim)> = a.values().zip(b.values()).map(|(x, y)| (*x, *y)).collect();
    let equivalent = pairs
        .par_iter()
        .map(|(x, y)| Ok(entailer.supports(&x.text, &y.text)? && entailer.supports(&y.text, &x.text)?))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|eq| *eq)
        .count();
    Ok(OverlapRow {
        first: sa,
        second: sb,
        n: pairs.len(),
        equivalent,
        overlap: ratio(equivalent, pairs.len()),
    })
}

/// Label used for the pooled rows of the switch-point table.
pub const ALL_STRATEGIES: &str = "ALL";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchRow {
    /// A strategy name or `ALL` for all strategies pooled.
    pub strategy: String,
    /// Claim ordinal minus the response's switch index.
    pub offset: i64,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Accuracy over every evaluation of the strategy, as a reference line.
    pub overall_accuracy: f64,
}

/// Accuracy bucketed by each claim's signed distance from its response's
/// entity switch point. Claims of responses without a switch index are left
/// out; an error is raised only when no response has one.
pub fn switch_point_analysis(
    evaluations: &[ClaimEvaluation],
    switch_index: &BTreeMap<String, Option<usize>>,
) -> Result<Vec<SwitchRow>> {
    if !switch_index.values().any(Option::is_some) {
        return Err(Error::MissingAnnotation(
            "switch-point analysis needs at least one response with a switch_index".into(),
        ));
    }
    let mut buckets: BTreeMap<(String, i64), (usize, usize)> = BTreeMap::new();
    let mut overall: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for e in evaluations {
        for key in [e.strategy.as_str().to_string(), ALL_STRATEGIES.to_string()] {
            let o = overall.entry(key.clone()).or_default();
            o.0 += 1;
            o.1 += usize::from(e.correct);
            if let Some(Some(switch)) = switch_index.get(&e.response_id) {
                let b = buckets.entry((key, e.ordinal as i64 - *switch as i64)).or_default();
                b.0 += 1;
                b.1 += usize::from(e.correct);
            }
        }
    }
    let order = |name: &str| {
        Strategy::ALL
            .iter()
            .position(|s| s.as_str() == name)
            .unwrap_or(Strategy::ALL.len())
    };
    let mut rows: Vec<SwitchRow> = buckets
        .into_iter()
        .map(|((strategy, offset), (n, correct))| {
            let (on, oc) = overall[&strategy];
            SwitchRow {
                offset,
                n,
                correct,
                accuracy: ratio(correct, n),
                overall_accuracy: ratio(oc, on),
                strategy,
            }
        })
        .collect();
    rows.sort_by_key(|r| (order(&r.strategy), r.offset));
    Ok(rows)
}
