//! Randomized corpora and the invariants checked over them.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use molfact::ambigeval::{self, AmbigClaim, ClaimEvaluation, ErrorCategory};
use molfact::decontext::{ReviseOptions, Reviser};
use molfact::minimality::{self, EvidenceGenerator, MinimalityExperiment};
use molfact::providers::{Checker, CompletionRequest, Entailer, Llm, PairScorer};
use molfact::templates::Templates;
use molfact::{AtomicClaim, Error, EvidenceDocument, Judgment, Label, ModelResponse, RevisedClaim, Strategy};
use proptest::prelude::*;
use proptest::strategy::Strategy as _;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use serde_json::json;

pub const CASES: u32 = 256;

/// Run `check` over `CASES` generated inputs; the error names the failing input.
pub fn run_property<S: proptest::strategy::Strategy>(
    strategy: S,
    check: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<u32, String>
where
    S::Value: std::fmt::Debug,
{
    let mut runner = TestRunner::new(Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map(|_| CASES).map_err(|e| e.to_string())
}

/// Deterministic pseudo-random score in [0, 1] for an ordered text pair.
pub fn hashed_score(salt: u64, first: &str, second: &str) -> f64 {
    let mut h = DefaultHasher::new();
    (salt, first, second).hash(&mut h);
    (h.finish() % 10_001) as f64 / 10_000.0
}

pub fn hashed_scorer(salt: u64) -> Arc<dyn PairScorer> {
    Arc::new(move |a: &str, b: &str| -> molfact::Result<f64> { Ok(hashed_score(salt, a, b)) })
}

// ---- ambiguous evaluation ------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenClaim {
    pub human_supported: bool,
    pub gold: usize,
    pub words: usize,
    /// Per strategy: one score per document, and whether the text changed.
    pub per_strategy: Vec<(Vec<f64>, bool, usize)>,
}

#[derive(Debug, Clone)]
pub struct GenAmbig {
    pub entities: usize,
    /// Entity of each document.
    pub docs: Vec<usize>,
    pub claims: Vec<GenClaim>,
}

pub fn ambig_corpus() -> impl proptest::strategy::Strategy<Value = GenAmbig> {
    (2usize..=3)
        .prop_flat_map(|entities| {
            let docs = prop::collection::vec(0..entities, entities..=entities + 2).prop_map(move |mut d| {
                // Every entity has at least one document.
                for (i, slot) in d.iter_mut().take(entities).enumerate() {
                    *slot = i;
                }
                d
            });
            (Just(entities), docs)
        })
        .prop_flat_map(|(entities, docs)| {
            let n_docs = docs.len();
            let claim = (
                any::<bool>(),
                0..entities,
                1usize..15,
                prop::collection::vec(
                    (prop::collection::vec(0.0f64..=1.0, n_docs), any::<bool>(), 1usize..30),
                    Strategy::ALL.len(),
                ),
            )
                .prop_map(|(human_supported, gold, words, per_strategy)| GenClaim {
                    human_supported,
                    gold,
                    words,
                    per_strategy,
                });
            (Just(entities), Just(docs), prop::collection::vec(claim, 1..40))
        })
        .prop_map(|(entities, docs, claims)| GenAmbig { entities, docs, claims })
}

fn words(n: usize, tag: &str) -> String {
    (0..n).map(|i| format!("{tag}{i}")).collect::<Vec<_>>().join(" ")
}

pub struct BuiltAmbig {
    pub claims: Vec<AmbigClaim>,
    pub docs: Vec<EvidenceDocument>,
    pub revisions: Vec<RevisedClaim>,
}

pub fn build_ambig(g: &GenAmbig) -> BuiltAmbig {
    let docs: Vec<EvidenceDocument> = g
        .docs
        .iter()
        .enumerate()
        .map(|(i, e)| EvidenceDocument {
            doc_id: format!("d{i}"),
            entity_id: format!("e{e}"),
            text: format!("document {i}"),
            is_gold_entity: false,
            claim_scope: String::new(),
        })
        .collect();
    let mut claims = Vec::new();
    let mut revisions = Vec::new();
    for (i, c) in g.claims.iter().enumerate() {
        let claim = AmbigClaim {
            claim_id: format!("c{i}"),
            response_id: "r".into(),
            ordinal: i,
            text: words(c.words, "w"),
            human_label: Label::from_bool(c.human_supported),
            gold_entity_id: format!("e{}", c.gold),
        };
        for (s, (_, modified, len)) in Strategy::ALL.iter().zip(&c.per_strategy) {
            let text = if *s == Strategy::Atomic || !modified {
                claim.text.clone()
            } else {
                words(*len, "m")
            };
            revisions.push(RevisedClaim::new(&claim.atomic(), *s, text, None, Default::default()));
        }
        claims.push(claim);
    }
    BuiltAmbig { claims, docs, revisions }
}

pub fn evaluations_at(g: &GenAmbig, built: &BuiltAmbig, threshold: f64) -> Vec<ClaimEvaluation> {
    let entity_of: BTreeMap<&str, &str> =
        built.docs.iter().map(|d| (d.doc_id.as_str(), d.entity_id.as_str())).collect();
    let mut evals = Vec::new();
    for rev in &built.revisions {
        let i: usize = rev.claim_id[1..].parse().unwrap();
        let s = Strategy::ALL.iter().position(|s| *s == rev.strategy).unwrap();
        let judgments = g.claims[i].per_strategy[s]
            .0
            .iter()
            .zip(&built.docs)
            .map(|(score, d)| Judgment::new(&rev.claim_id, rev.strategy, &d.doc_id, *score, threshold, "gen"))
            .collect();
        evals.push(ClaimEvaluation::from_judgments(&built.claims[i], rev, judgments, &entity_of).unwrap());
    }
    evals
}

const EPS: f64 = 1e-12;

/// Error categories partition the errors, and overall error is 1 - accuracy.
pub fn partition_holds(g: GenAmbig) -> Result<(), TestCaseError> {
    let built = build_ambig(&g);
    let evals = evaluations_at(&g, &built, 0.5);
    let acc = ambigeval::accuracy_report(&evals, &Strategy::ALL);
    let err = ambigeval::error_breakdown(&evals, &Strategy::ALL).map_err(|e| TestCaseError::fail(e.to_string()))?;
    for (a, e) in acc.iter().zip(&err) {
        prop_assert_eq!(a.strategy, e.strategy);
        let total: usize = ErrorCategory::ALL.iter().map(|c| e.counts.get(c).copied().unwrap_or(0)).sum();
        prop_assert_eq!(total, e.errors);
        prop_assert_eq!(e.errors, a.n - a.correct);
        let rate_sum: f64 = ErrorCategory::ALL.iter().map(|c| e.rate(*c)).sum();
        prop_assert!((rate_sum - e.error_rate).abs() < EPS);
        prop_assert!((e.error_rate - (1.0 - a.accuracy)).abs() < EPS);
    }
    Ok(())
}

/// Overall accuracy is the label-weighted mean of the per-label accuracies.
pub fn subset_weighting_holds(g: GenAmbig) -> Result<(), TestCaseError> {
    let built = build_ambig(&g);
    let evals = evaluations_at(&g, &built, 0.5);
    for a in ambigeval::accuracy_report(&evals, &Strategy::ALL) {
        prop_assert_eq!(a.n, a.n_supported + a.n_not_supported);
        prop_assert_eq!(a.correct, a.correct_supported + a.correct_not_supported);
        let weighted = a.accuracy_supported * a.n_supported as f64 + a.accuracy_not_supported * a.n_not_supported as f64;
        prop_assert!((weighted / a.n as f64 - a.accuracy).abs() < 1e-9);
    }
    Ok(())
}

/// ATOMIC keeps the claim verbatim and reports no modification rate.
pub fn atomic_identity_holds(g: GenAmbig) -> Result<(), TestCaseError> {
    let built = build_ambig(&g);
    let refuse = Arc::new(|req: &CompletionRequest| -> molfact::Result<String> {
        Err(Error::ProviderUnavailable(format!("ATOMIC must not call `{}`", req.template_id)))
    });
    let reviser = Reviser::new(
        Llm::new(refuse, Arc::new(Templates::builtin()), "none", 0.75, Some(1)),
        ReviseOptions::default(),
    );
    let response = ModelResponse {
        response_id: "r".into(),
        prompt: "p".into(),
        text: "t".into(),
        source: String::new(),
    };
    for c in &built.claims {
        let rev = reviser.revise(Strategy::Atomic, &c.atomic(), &response).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(&rev.text, &c.text);
        prop_assert!(!rev.modified);
        prop_assert_eq!(rev.word_count, c.text.split_whitespace().count());
    }
    let evals = evaluations_at(&g, &built, 0.5);
    let acc = ambigeval::accuracy_report(&evals, &[Strategy::Atomic]);
    prop_assert!(acc[0].modification_rate.is_none());
    prop_assert!(evals.iter().filter(|e| e.strategy == Strategy::Atomic).all(|e| !e.modified));
    Ok(())
}

/// Raising the check threshold never adds support.
pub fn check_threshold_monotone(input: (GenAmbig, f64, f64)) -> Result<(), TestCaseError> {
    let (g, a, b) = input;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let built = build_ambig(&g);
    let low = evaluations_at(&g, &built, lo);
    let high = evaluations_at(&g, &built, hi);
    for (l, h) in low.iter().zip(&high) {
        prop_assert!(h.supporting_entities.is_subset(&l.supporting_entities));
        prop_assert!(!(h.predicted_label == Label::Supported && l.predicted_label == Label::NotSupported));
    }
    let count = |evals: &[ClaimEvaluation]| evals.iter().filter(|e| e.predicted_label == Label::Supported).count();
    prop_assert!(count(&high) <= count(&low));
    Ok(())
}

// ---- minimality ----------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenFacts {
    pub salt: u64,
    pub sizes: Vec<usize>,
}

pub fn fact_corpus() -> impl proptest::strategy::Strategy<Value = GenFacts> {
    (any::<u64>(), prop::collection::vec(2usize..7, 1..4)).prop_map(|(salt, sizes)| GenFacts { salt, sizes })
}

pub fn build_facts(g: &GenFacts) -> Vec<(ModelResponse, Vec<AtomicClaim>)> {
    g.sizes
        .iter()
        .enumerate()
        .map(|(r, &n)| {
            let rid = format!("r{r}");
            let claims: Vec<AtomicClaim> = (0..n)
                .map(|i| AtomicClaim {
                    claim_id: AtomicClaim::make_id(&rid, i),
                    response_id: rid.clone(),
                    text: format!("Fact r{r}x{i} holds."),
                    ordinal: i,
                    human_label: Some(Label::Supported),
                    subject_hint: None,
                })
                .collect();
            let text = claims.iter().map(|c| c.text.as_str()).collect::<Vec<_>>().join(" ");
            let response = ModelResponse {
                response_id: rid,
                prompt: "p".into(),
                text,
                source: String::new(),
            };
            (response, claims)
        })
        .collect()
}

/// Chat stand-in: revisions append a marker; evidence lists the key facts.
fn generated_chat(req: &CompletionRequest) -> molfact::Result<String> {
    let var = |k: &str| req.vars.get(k).cloned().unwrap_or_default();
    match req.template_id.as_str() {
        "simple_decontext" => Ok(format!("{} (in context)", var("claim"))),
        "safe_revision" => Ok(format!("```\n{} (self-contained)\n```", var("claim"))),
        "evidence" | "evidence_strict" => {
            let article = var("key_facts")
                .lines()
                .map(|l| l.trim_start_matches("- ").trim())
                .collect::<Vec<_>>()
                .join(" ");
            Ok(format!("```json\n{}\n```", json!({ "article": article })))
        }
        other => Err(Error::ProviderUnavailable(format!("unexpected template {other}"))),
    }
}

pub fn experiment(salt: u64, entail_threshold: f64) -> MinimalityExperiment {
    let llm = Llm::new(Arc::new(generated_chat), Arc::new(Templates::builtin()), "gen", 0.75, Some(salt));
    let entailer = Entailer::new(hashed_scorer(salt), entail_threshold);
    let checker = Checker::new(hashed_scorer(salt ^ 0x5eed), 0.5, "gen-check");
    MinimalityExperiment {
        reviser: Reviser::new(llm.clone(), ReviseOptions::default()),
        entailer,
        checker: checker.clone(),
        evidence: EvidenceGenerator::new(llm, checker, 1),
        run_seed: salt,
    }
}

/// Every auto non-minimal case is a potential one, and its flags agree with
/// a direct re-check of the generated evidence.
pub fn auto_within_potential(g: GenFacts) -> Result<(), TestCaseError> {
    let corpus = build_facts(&g);
    let total: usize = corpus.iter().map(|(_, c)| c.len()).sum();
    let exp = experiment(g.salt, 0.5);
    let strategies = [Strategy::Simple, Strategy::Safe];
    let outcome = exp.run(&corpus, &strategies).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let report = minimality::minimality_report(&outcome.verdicts, &strategies, total);
    for row in &report.rows {
        prop_assert!(row.auto_nonminimal <= row.potential_nonminimal);
        prop_assert!(row.auto_nonminimal_rate <= row.potential_nonminimal_rate);
    }
    let check = |ev: &str, c: &str| hashed_score(g.salt ^ 0x5eed, ev, c) >= 0.5;
    for (case, verdict) in outcome.cases.iter().zip(&outcome.verdicts) {
        prop_assert_eq!(&case.record.core_claim.claim_id, &verdict.claim_id);
        let expected = check(&case.evidence_text, &case.record.core_claim.text)
            && !check(&case.evidence_text, &case.record.decontext.text)
            && !check(&case.evidence_text, &case.banned_fact.text);
        prop_assert_eq!(verdict.auto_nonminimal, expected);
        prop_assert!(case.record.entailed_aux.iter().any(|a| a.claim_id == case.banned_fact.claim_id));
        prop_assert!(case.key_facts.iter().all(|k| k.claim_id != case.banned_fact.claim_id));
    }
    Ok(())
}

/// A stricter entailment threshold keeps a subset of the multi-fact records,
/// each with a subset of its auxiliary facts.
pub fn entail_threshold_monotone(input: (GenFacts, f64, f64)) -> Result<(), TestCaseError> {
    let (g, a, b) = input;
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let corpus = build_facts(&g);
    let low = Entailer::new(hashed_scorer(g.salt), lo);
    let high = Entailer::new(hashed_scorer(g.salt), hi);
    for (_, claims) in &corpus {
        for c in claims {
            let rev = RevisedClaim::new(c, Strategy::Simple, format!("{} (in context)", c.text), None, Default::default());
            let l = minimality::find_multifact(&low, &rev, claims).unwrap();
            let h = minimality::find_multifact(&high, &rev, claims).unwrap();
            if let Some(h) = h {
                let l = l.ok_or_else(|| TestCaseError::fail("record lost at the lower threshold"))?;
                let la: BTreeSet<_> = l.entailed_aux.iter().map(|x| &x.claim_id).collect();
                prop_assert!(h.entailed_aux.iter().all(|x| la.contains(&x.claim_id)));
            }
            let keys_high: BTreeSet<_> = minimality::filter_key_facts(&high, c, claims).unwrap().into_iter().map(|k| k.claim_id).collect();
            let keys_low: BTreeSet<_> = minimality::filter_key_facts(&low, c, claims).unwrap().into_iter().map(|k| k.claim_id).collect();
            // A looser threshold removes at least as many key facts.
            prop_assert!(keys_low.is_subset(&keys_high));
        }
    }
    Ok(())
}

// ---- overlap -------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenOverlap {
    pub salt: u64,
    /// Text index of the first and second revision of each claim.
    pub pairs: Vec<(u8, u8)>,
}

pub fn overlap_corpus() -> impl proptest::strategy::Strategy<Value = GenOverlap> {
    (any::<u64>(), prop::collection::vec((0u8..6, 0u8..6), 1..30)).prop_map(|(salt, pairs)| GenOverlap { salt, pairs })
}

/// Overlap is symmetric in its two strategies.
pub fn overlap_symmetric(g: GenOverlap) -> Result<(), TestCaseError> {
    let entailer = Entailer::new(hashed_scorer(g.salt), 0.5);
    let mk = |s: Strategy, idx: &dyn Fn(&(u8, u8)) -> u8| -> Vec<RevisedClaim> {
        g.pairs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let claim = AtomicClaim {
                    claim_id: format!("c{i}"),
                    response_id: "r".into(),
                    text: format!("claim {i}"),
                    ordinal: i,
                    human_label: None,
                    subject_hint: None,
                };
                RevisedClaim::new(&claim, s, format!("text {}", idx(p)), None, Default::default())
            })
            .collect()
    };
    let first = mk(Strategy::Simple, &|p| p.0);
    let second = mk(Strategy::Molecular, &|p| p.1);
    let ab = ambigeval::information_overlap(&entailer, &first, &second).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let ba = ambigeval::information_overlap(&entailer, &second, &first).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(ab.equivalent, ba.equivalent);
    prop_assert_eq!(ab.overlap, ba.overlap);
    // Identical texts are always equivalent to themselves.
    let same = ambigeval::information_overlap(&entailer, &first, &first).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let reflexive = first.iter().filter(|r| hashed_score(g.salt, &r.text, &r.text) >= 0.5).count();
    prop_assert_eq!(same.equivalent, reflexive);
    Ok(())
}
