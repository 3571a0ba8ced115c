//! Pipeline execution: provider wiring, stage commands and the output tree.
//!
//! Every command writes into the configured output directory:
//!
//! ```text
//! claims.jsonl       decomposed fact-check claims (decompose, minimality)
//! revisions.jsonl    revised claims (revise, minimality, ambig-eval, overlap)
//! judgments.jsonl    per-document checks (ambig-eval)
//! cases.jsonl        partial-evidence cases (minimality)
//! verdicts.jsonl     minimality verdicts (minimality)
//! reports/*.csv|md   result tables
//! manifest.json      hashes of config, templates, replay store, inputs and outputs
//! ```
//!
//! A `.lock` file keeps concurrent runs out of one directory. A failed run
//! leaves `failure.json` with the error kind and message.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{de::DeserializeOwned, Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use tracing::info;

use crate::ambigeval::{self, AmbigClaim, ClaimEvaluation, OVERLAP_PAIRS};
use crate::config::{ChatKind, RunConfig, ScorerKind};
use crate::decomposition::Decomposer;
use crate::decontext::{ReviseOptions, Reviser};
use crate::error::{Error, Result};
use crate::ingest::{self, AmbigCorpus, AmbigPaths};
use crate::minimality::{self, EvidenceGenerator, MinimalityExperiment, MinimalityVerdict};
use crate::model::{AtomicClaim, Judgment, ModelResponse, RevisedClaim, Strategy};
use crate::providers::fixture::{FixtureScorer, ScriptedChat};
use crate::providers::http::{HttpChat, HttpScorer};
use crate::providers::{
    ChatModel, Checker, Entailer, Llm, LlmCheckScorer, PairScorer, RecordedChat, RecordedScorer, ReplayStore,
    ScoreKind,
};
use crate::report::{self, Table};
use crate::templates::Templates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Decompose,
    Revise,
    Minimality,
    AmbigEval,
    Overlap,
    Report,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Revise => "revise",
            Command::Minimality => "minimality",
            Command::AmbigEval => "ambig-eval",
            Command::Overlap => "overlap",
            Command::Report => "report",
        }
    }
}

pub const MANIFEST: &str = "manifest.json";
pub const FAILURE: &str = "failure.json";
pub const LOCK: &str = ".lock";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: Command,
    pub seed: u64,
    pub config_hash: String,
    pub template_hashes: BTreeMap<String, String>,
    /// Absent for commands that use no provider.
    pub replay_store_hash: Option<String>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub summary: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub command: Command,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn new(command: Command, error: &Error) -> Self {
        Failure {
            command,
            kind: error.kind().to_string(),
            message: error.to_string(),
        }
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let raw = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
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

/// Files written by one command, with their hashes.
struct Outputs {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Outputs {
            dir: dir.to_path_buf(),
            files: BTreeMap::new(),
        }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_file(&self.dir.join(name), bytes)?;
        self.files.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn jsonl<T: Serialize>(&mut self, name: &str, items: &[T]) -> Result<()> {
        let mut out = String::new();
        for item in items {
            out.push_str(&serde_json::to_string(item)?);
            out.push('\n');
        }
        self.write(name, out.as_bytes())
    }

    fn table(&mut self, table: &Table) -> Result<()> {
        self.write(&format!("reports/{}.csv", table.name), table.to_csv()?.as_bytes())?;
        self.write(&format!("reports/{}.md", table.name), table.to_markdown().as_bytes())
    }
}

/// Removes the lock file when the run ends.
struct LockGuard(PathBuf);

impl LockGuard {
    fn acquire(dir: &Path) -> Result<Self> {
        let path = dir.join(LOCK);
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(LockGuard(path)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Locked(dir.to_path_buf())),
            Err(e) => Err(Error::io(format!("creating {}", path.display()), e)),
        }
    }
}

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

/// Providers and settings shared by the stage commands.
pub struct Pipeline {
    pub config: RunConfig,
    pub templates: Arc<Templates>,
    pub store: Arc<ReplayStore>,
    pub llm: Llm,
    pub entailer: Entailer,
    pub checker: Checker,
    pool: rayon::ThreadPool,
}

impl Pipeline {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.validate()?;
        let seed = config.seed()?;
        let templates = Arc::new(match &config.inputs.templates_dir {
            Some(dir) => Templates::with_overrides(&config.resolve(dir))?,
            None => Templates::builtin(),
        });
        let store = Arc::new(ReplayStore::open(config.resolve(&config.replay_dir), config.cache_mode)?);
        let live = config.cache_mode == crate::providers::CacheMode::LiveRecord;

        let chat_upstream: Option<Arc<dyn ChatModel>> = if !live {
            None
        } else {
            Some(match config.chat.kind {
                ChatKind::Http => Arc::new(HttpChat::new(
                    config.chat.endpoint.clone().unwrap_or_default(),
                    config.chat.token_env.as_deref(),
                )?),
                ChatKind::Scripted => {
                    let path = config.chat.transcript.as_ref().expect("validated");
                    Arc::new(ScriptedChat::from_jsonl(&config.resolve(path))?)
                }
            })
        };
        let chat: Arc<dyn ChatModel> = Arc::new(RecordedChat::new(store.clone(), chat_upstream));
        let llm = Llm::new(chat, templates.clone(), config.chat.model.clone(), config.temperature, Some(seed));

        let fixture = |path: &Option<PathBuf>, kind: ScoreKind| -> Result<FixtureScorer> {
            match path {
                Some(p) => {
                    let (entail, check) = FixtureScorer::pair_from_jsonl(&config.resolve(p))?;
                    Ok(if kind == ScoreKind::Entail { entail } else { check })
                }
                None => Ok(FixtureScorer::containment_only()),
            }
        };
        let upstream = |kind: ScoreKind| -> Result<Option<Arc<dyn PairScorer>>> {
            if !live {
                return Ok(None);
            }
            let section = if kind == ScoreKind::Entail { &config.entailment } else { &config.check };
            Ok(Some(match section.kind {
                ScorerKind::Http => Arc::new(HttpScorer::new(
                    section.endpoint.clone().unwrap_or_default(),
                    kind,
                    section.token_env.as_deref(),
                )),
                ScorerKind::Fixture => Arc::new(fixture(&section.scores, kind)?),
                ScorerKind::Llm => {
                    let model = section.model.clone().unwrap_or_else(|| config.chat.model.clone());
                    Arc::new(LlmCheckScorer::new(llm.with_model(model)))
                }
            }))
        };
        let entail_tag = config.entailment.model.clone().unwrap_or_else(|| "entailment".into());
        let check_tag = config.check.model.clone().unwrap_or_else(|| "check".into());
        let entailer = Entailer::new(
            Arc::new(RecordedScorer::new(store.clone(), ScoreKind::Entail, entail_tag, upstream(ScoreKind::Entail)?)),
            config.entailment_threshold(),
        );
        let checker = Checker::new(
            Arc::new(RecordedScorer::new(store.clone(), ScoreKind::Check, check_tag.clone(), upstream(ScoreKind::Check)?)),
            config.check_threshold(),
            check_tag,
        );
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.concurrency)
            .build()
            .map_err(|e| Error::Config(format!("building thread pool: {e}")))?;
        Ok(Pipeline {
            config,
            templates,
            store,
            llm,
            entailer,
            checker,
            pool,
        })
    }

    fn reviser(&self) -> Reviser {
        Reviser::new(
            self.llm.clone(),
            ReviseOptions {
                skip_stage2_on_none: self.config.skip_stage2_on_none,
            },
        )
    }

    /// Fact-check corpus with any claim-less response decomposed.
    pub fn factcheck_claims(&self) -> Result<(Vec<(ModelResponse, Vec<AtomicClaim>)>, usize)> {
        let path = self
            .config
            .inputs
            .factcheck
            .as_ref()
            .ok_or_else(|| Error::Config("`inputs.factcheck` is required for this command".into()))?;
        let corpus = ingest::ingest_factcheck_corpus(&self.config.resolve(path))?;
        let decomposer = Decomposer::new(self.llm.clone()).with_check_worthiness(self.config.check_worthiness);
        let records = self.pool.install(|| {
            corpus
                .records
                .into_par_iter()
                .map(|(response, claims)| {
                    if claims.is_empty() {
                        let claims = decomposer.extract_atomic_facts(&response)?;
                        Ok((response, claims))
                    } else {
                        Ok((response, claims))
                    }
                })
                .collect::<Result<Vec<_>>>()
        })?;
        Ok((records, corpus.dropped_claims))
    }

    pub fn ambig_corpus(&self) -> Result<AmbigCorpus> {
        load_ambig_corpus(&self.config)
    }

    /// Revise every claim with every configured strategy, strategy-major.
    pub fn revise_all(&self, items: &[(AtomicClaim, &ModelResponse)]) -> Result<Vec<RevisedClaim>> {
        let reviser = self.reviser();
        let jobs: Vec<(Strategy, &AtomicClaim, &ModelResponse)> = self
            .config
            .strategies
            .iter()
            .flat_map(|&s| items.iter().map(move |(c, r)| (s, c, *r)))
            .collect();
        self.pool.install(|| {
            jobs.par_iter()
                .map(|(s, c, r)| reviser.revise(*s, c, r))
                .collect::<Result<Vec<_>>>()
        })
    }

    fn ambig_revisions(&self, corpus: &AmbigCorpus) -> Result<Vec<RevisedClaim>> {
        let items = corpus
            .claims
            .iter()
            .map(|c| {
                let response = corpus
                    .response(&c.response_id)
                    .ok_or_else(|| Error::InvalidClaim(format!("claim {} has no response", c.claim_id)))?;
                Ok((c.atomic(), response))
            })
            .collect::<Result<Vec<_>>>()?;
        self.revise_all(&items)
    }
}

fn hash_inputs(config: &RunConfig) -> Result<BTreeMap<String, String>> {
    let inputs = &config.inputs;
    let mut hashes = BTreeMap::new();
    for (key, path) in [
        ("factcheck", &inputs.factcheck),
        ("ambig_responses", &inputs.ambig_responses),
        ("ambig_claims", &inputs.ambig_claims),
        ("ambig_documents", &inputs.ambig_documents),
        ("minimality_annotations", &inputs.minimality_annotations),
    ] {
        if let Some(p) = path {
            let p = config.resolve(p);
            if p.exists() {
                let bytes = fs::read(&p).map_err(|e| Error::io(format!("reading {}", p.display()), e))?;
                hashes.insert(key.to_string(), sha256_hex(&bytes));
            }
        }
    }
    Ok(hashes)
}

/// Run `command` and write its outputs. On failure `failure.json` is written
/// and the error returned.
pub fn run(config: &RunConfig, command: Command) -> Result<Manifest> {
    config.validate()?;
    let dir = config.resolve(&config.output_dir);
    fs::create_dir_all(&dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    let _lock = LockGuard::acquire(&dir)?;
    let failure_path = dir.join(FAILURE);
    match execute(config, command, &dir) {
        Ok(manifest) => {
            if failure_path.exists() {
                fs::remove_file(&failure_path).map_err(|e| Error::io("removing stale failure.json", e))?;
            }
            Ok(manifest)
        }
        Err(e) => {
            let text = serde_json::to_string_pretty(&Failure::new(command, &e))?;
            write_file(&failure_path, format!("{text}\n").as_bytes())?;
            Err(e)
        }
    }
}

fn execute(config: &RunConfig, command: Command, dir: &Path) -> Result<Manifest> {
    let mut out = Outputs::new(dir);
    let (summary, pipeline) = if command == Command::Report {
        (report_offline(config, dir, &mut out)?, None)
    } else {
        let pipeline = Pipeline::new(config.clone())?;
        let summary = match command {
            Command::Decompose => decompose(&pipeline, &mut out)?,
            Command::Revise => revise(&pipeline, &mut out)?,
            Command::Minimality => run_minimality(&pipeline, &mut out)?,
            Command::AmbigEval => ambig_eval(&pipeline, &mut out)?,
            Command::Overlap => overlap(&pipeline, &mut out)?,
            Command::Report => unreachable!(),
        };
        (summary, Some(pipeline))
    };
    let templates = match &pipeline {
        Some(p) => p.templates.hashes(),
        None => Templates::builtin().hashes(),
    };
    let manifest = Manifest {
        command,
        seed: config.seed()?,
        config_hash: config.content_hash(),
        template_hashes: templates,
        replay_store_hash: pipeline.as_ref().map(|p| p.store.content_hash()).transpose()?,
        inputs: hash_inputs(config)?,
        outputs: out.files.clone(),
        summary,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    write_file(&dir.join(MANIFEST), text.as_bytes())?;
    info!(command = command.as_str(), dir = %dir.display(), "run complete");
    Ok(manifest)
}

fn decompose(p: &Pipeline, out: &mut Outputs) -> Result<Value> {
    let (records, dropped) = p.factcheck_claims()?;
    let claims: Vec<AtomicClaim> = records.into_iter().flat_map(|(_, c)| c).collect();
    out.jsonl("claims.jsonl", &claims)?;
    Ok(json!({ "claims": claims.len(), "dropped_claims": dropped }))
}

fn revise(p: &Pipeline, out: &mut Outputs) -> Result<Value> {
    let revisions = if p.config.inputs.ambig_claims.is_some() {
        p.ambig_revisions(&p.ambig_corpus()?)?
    } else {
        let (records, _) = p.factcheck_claims()?;
        let items: Vec<(AtomicClaim, &ModelResponse)> = records
            .iter()
            .flat_map(|(r, cs)| cs.iter().map(move |c| (c.clone(), r)))
            .collect();
        p.revise_all(&items)?
    };
    out.jsonl("revisions.jsonl", &revisions)?;
    Ok(json!({ "revisions": revisions.len() }))
}

fn run_minimality(p: &Pipeline, out: &mut Outputs) -> Result<Value> {
    let (records, dropped) = p.factcheck_claims()?;
    let corpus_size: usize = records.iter().map(|(_, c)| c.len()).sum();
    let experiment = MinimalityExperiment {
        reviser: p.reviser(),
        entailer: p.entailer.clone(),
        checker: p.checker.clone(),
        evidence: EvidenceGenerator::new(p.llm.clone(), p.checker.clone(), p.config.evidence_retries),
        run_seed: p.config.seed()?,
    };
    let outcome = p.pool.install(|| experiment.run(&records, &p.config.strategies))?;
    let claims: Vec<&AtomicClaim> = records.iter().flat_map(|(_, c)| c).collect();
    out.jsonl("claims.jsonl", &claims)?;
    out.jsonl("revisions.jsonl", &outcome.revisions)?;
    out.jsonl("cases.jsonl", &outcome.cases)?;
    out.jsonl("verdicts.jsonl", &outcome.verdicts)?;
    let tables = minimality_tables(p.config.clone(), &outcome.verdicts, corpus_size)?;
    for t in &tables {
        out.table(t)?;
    }
    Ok(json!({
        "corpus_size": corpus_size,
        "dropped_claims": dropped,
        "multi_fact_records": outcome.records,
        "cases": outcome.cases.len(),
        "drops": outcome.drops,
    }))
}

fn minimality_tables(config: RunConfig, verdicts: &[MinimalityVerdict], corpus_size: usize) -> Result<Vec<Table>> {
    let report = minimality::minimality_report(verdicts, &config.strategies, corpus_size);
    let mut tables = vec![report::minimality_table(&report.rows)];
    if let Some(path) = &config.inputs.minimality_annotations {
        let annotations = ingest::ingest_minimality_annotations(&config.resolve(path))?;
        let rows = minimality::human_minimality_split(verdicts, &annotations, &config.strategies, corpus_size);
        tables.push(report::human_minimality_table(&rows));
    }
    Ok(tables)
}

fn ambig_tables(
    config: &RunConfig,
    corpus: &AmbigCorpus,
    evaluations: &[ClaimEvaluation],
) -> Result<Vec<Table>> {
    let accuracy = ambigeval::accuracy_report(evaluations, &config.strategies);
    let errors = ambigeval::error_breakdown(evaluations, &config.strategies)?;
    for (a, e) in accuracy.iter().zip(&errors) {
        if a.n - a.correct != e.errors {
            return Err(Error::Invariant(format!(
                "{}: {} incorrect but {} categorized errors",
                a.strategy,
                a.n - a.correct,
                e.errors
            )));
        }
    }
    let mut tables = vec![report::accuracy_table(&accuracy), report::error_table(&errors)];
    let switch = corpus.switch_indices();
    if switch.values().any(Option::is_some) {
        tables.push(report::switch_point_table(&ambigeval::switch_point_analysis(evaluations, &switch)?));
    }
    Ok(tables)
}

fn ambig_summary(corpus: &AmbigCorpus, config: &RunConfig) -> Value {
    json!({
        "claims": corpus.claims.len(),
        "sample_size": config.sample_size,
        "dropped_claims": corpus.dropped_claims,
        "documents": corpus.documents.len(),
        "responses": corpus.responses.len(),
    })
}

fn ambig_eval(p: &Pipeline, out: &mut Outputs) -> Result<Value> {
    let corpus = p.ambig_corpus()?;
    let revisions = p.ambig_revisions(&corpus)?;
    let evaluations = p
        .pool
        .install(|| ambigeval::evaluate_all(&p.checker, &corpus.claims, &revisions, &corpus.documents))?;
    let judgments: Vec<&Judgment> = evaluations.iter().flat_map(|e| &e.judgments).collect();
    out.jsonl("revisions.jsonl", &revisions)?;
    out.jsonl("judgments.jsonl", &judgments)?;
    for t in ambig_tables(&p.config, &corpus, &evaluations)? {
        out.table(&t)?;
    }
    Ok(ambig_summary(&corpus, &p.config))
}

fn overlap(p: &Pipeline, out: &mut Outputs) -> Result<Value> {
    let corpus = p.ambig_corpus()?;
    let revisions = p.ambig_revisions(&corpus)?;
    let by_strategy = |s: Strategy| -> Vec<RevisedClaim> {
        revisions.iter().filter(|r| r.strategy == s).cloned().collect()
    };
    let rows = OVERLAP_PAIRS
        .iter()
        .filter(|(a, b)| p.config.strategies.contains(a) && p.config.strategies.contains(b))
        .map(|(a, b)| p.pool.install(|| ambigeval::information_overlap(&p.entailer, &by_strategy(*a), &by_strategy(*b))))
        .collect::<Result<Vec<_>>>()?;
    out.jsonl("revisions.jsonl", &revisions)?;
    out.table(&report::overlap_table(&rows))?;
    Ok(json!({ "pairs": rows.len(), "claims": corpus.claims.len() }))
}

/// Rebuild evaluations from stored judgments without any provider.
pub fn evaluations_from_records(
    corpus: &AmbigCorpus,
    revisions: &[RevisedClaim],
    judgments: &[Judgment],
) -> Result<Vec<ClaimEvaluation>> {
    let claims: BTreeMap<&str, &AmbigClaim> = corpus.claims.iter().map(|c| (c.claim_id.as_str(), c)).collect();
    let entity_of: BTreeMap<&str, &str> = corpus
        .documents
        .iter()
        .map(|d| (d.doc_id.as_str(), d.entity_id.as_str()))
        .collect();
    let mut grouped: BTreeMap<(Strategy, &str), Vec<Judgment>> = BTreeMap::new();
    for j in judgments {
        grouped.entry((j.strategy, j.claim_id.as_str())).or_default().push(j.clone());
    }
    let mut evaluations = Vec::with_capacity(revisions.len());
    for rev in revisions {
        let claim = claims
            .get(rev.claim_id.as_str())
            .ok_or_else(|| Error::InvalidClaim(format!("stored revision for unknown claim {}", rev.claim_id)))?;
        let js = grouped.remove(&(rev.strategy, rev.claim_id.as_str())).ok_or_else(|| {
            Error::InvalidClaim(format!("no stored judgments for {} / {}", rev.strategy, rev.claim_id))
        })?;
        evaluations.push(ClaimEvaluation::from_judgments(claim, rev, js, &entity_of)?);
    }
    evaluations.sort_by(|a, b| (a.strategy, &a.claim_id).cmp(&(b.strategy, &b.claim_id)));
    Ok(evaluations)
}

/// Ambiguous corpus from the configured inputs, sampled if configured.
pub fn load_ambig_corpus(config: &RunConfig) -> Result<AmbigCorpus> {
    let inputs = &config.inputs;
    let need = |p: &Option<PathBuf>, key: &str| {
        p.as_ref()
            .map(|p| config.resolve(p))
            .ok_or_else(|| Error::Config(format!("`inputs.{key}` is required for this command")))
    };
    let mut corpus = ingest::ingest_ambig_corpus(&AmbigPaths {
        responses: need(&inputs.ambig_responses, "ambig_responses")?,
        claims: need(&inputs.ambig_claims, "ambig_claims")?,
        documents: need(&inputs.ambig_documents, "ambig_documents")?,
    })?;
    if let Some(n) = config.sample_size {
        corpus.sample(n, config.seed()?);
    }
    Ok(corpus)
}

/// Recompute report tables from stored intermediates. Opens no provider.
fn report_offline(config: &RunConfig, dir: &Path, out: &mut Outputs) -> Result<Value> {
    let judgments_path = dir.join("judgments.jsonl");
    let verdicts_path = dir.join("verdicts.jsonl");
    let mut summary = serde_json::Map::new();
    if judgments_path.exists() {
        let corpus = load_ambig_corpus(config)?;
        let revisions: Vec<RevisedClaim> = read_jsonl(&dir.join("revisions.jsonl"))?;
        let judgments: Vec<Judgment> = read_jsonl(&judgments_path)?;
        let evaluations = evaluations_from_records(&corpus, &revisions, &judgments)?;
        for t in ambig_tables(config, &corpus, &evaluations)? {
            out.table(&t)?;
        }
        summary.insert("ambig".into(), ambig_summary(&corpus, config));
    }
    if verdicts_path.exists() {
        let verdicts: Vec<MinimalityVerdict> = read_jsonl(&verdicts_path)?;
        let claims: Vec<AtomicClaim> = read_jsonl(&dir.join("claims.jsonl"))?;
        for t in minimality_tables(config.clone(), &verdicts, claims.len())? {
            out.table(&t)?;
        }
        summary.insert("minimality".into(), json!({ "corpus_size": claims.len(), "cases": verdicts.len() }));
    }
    if summary.is_empty() {
        return Err(Error::Config(format!(
            "nothing to report: {} holds neither judgments.jsonl nor verdicts.jsonl",
            dir.display()
        )));
    }
    Ok(Value::Object(summary))
}
