//! One check per acceptance criterion. Each returns a short detail line on
//! success and the reason on failure.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use molfact::ambigeval::{AccuracyRow, ErrorCategory, ErrorRow, OverlapRow};
use molfact::minimality::{self, HumanMinimalityRow, MinimalityRow};
use molfact::providers::fixture::FixtureScorer;
use molfact::providers::Entailer;
use molfact::report;
use molfact::run::{self, read_jsonl};
use molfact::{ingest, AtomicClaim, Command, RevisedClaim, Strategy};
use serde_json::Value;

use super::props;
use super::{ambig_oracle, csv_rows, jsonl, pct, Fixture};

pub type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn timed_run(fx: &Fixture, command: Command) -> Result<Duration, String> {
    let start = Instant::now();
    molfact::run(&fx.config, command).map_err(|e| format!("{} failed: {e}", command.as_str()))?;
    Ok(start.elapsed())
}

/// Rates counted by hand from the fixture design (20 scored claims):
/// SIMPLE has 6 multi-fact rewrites, one dropped because both generated
/// articles leak the banned fact, so 5 potential; 2 of those lose support.
/// SAFE has 2 multi-fact rewrites, 1 of which loses support.
pub const MINIMALITY_EXPECTED: [[&str; 3]; 3] = [
    ["Baseline", "Potential Non-minimal", "Auto Non-minimal"],
    ["SAFE-DECONTEXT", "10.00%", "5.00%"],
    ["SIMPLE-DECONTEXT", "25.00%", "10.00%"],
];

pub fn minimality_fixture() -> Outcome {
    let fx = Fixture::new("minimality");
    let elapsed = timed_run(&fx, Command::Minimality)?;
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    let rows = csv_rows(&fx.read_out("reports/minimality.csv"));
    ensure!(rows == MINIMALITY_EXPECTED.map(|r| r.map(String::from).to_vec()).to_vec(), "table was {rows:?}");
    let verdicts = jsonl(&fx.out("verdicts.jsonl"));
    let auto: BTreeSet<(String, String)> = verdicts
        .iter()
        .filter(|v| v["auto_nonminimal"] == Value::Bool(true))
        .map(|v| (v["strategy"].as_str().unwrap().into(), v["claim_id"].as_str().unwrap().into()))
        .collect();
    let want: BTreeSet<(String, String)> = [("SAFE", "r4-c002"), ("SIMPLE", "r1-c001"), ("SIMPLE", "r3-c003")]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    ensure!(auto == want, "auto non-minimal set was {auto:?}");
    let human = csv_rows(&fx.read_out("reports/human_minimality.csv"));
    ensure!(
        human[1] == ["SAFE-DECONTEXT", "100.0%", "0.0%"] && human[2] == ["SIMPLE-DECONTEXT", "50.0%", "50.0%"],
        "human split was {human:?}"
    );
    Ok(format!("SIMPLE 25.00%/10.00%, SAFE 10.00%/5.00% over 20 claims in {} ms", elapsed.as_millis()))
}

fn oracle_length(words: &[usize]) -> String {
    let n = words.len() as f64;
    let mean = words.iter().sum::<usize>() as f64 / n;
    let var = words.iter().map(|w| (*w as f64 - mean).powi(2)).sum::<f64>() / n;
    let fmt = |x: f64| {
        let s = format!("{x:.2}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    };
    format!("{}±{}", fmt(mean), fmt(var.sqrt()))
}

pub fn ambig_fixture() -> Outcome {
    let fx = Fixture::new("ambig");
    let elapsed = timed_run(&fx, Command::AmbigEval)?;
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    let claims = jsonl(&fx.path("claims.jsonl"));
    let entity_count = jsonl(&fx.path("documents.jsonl"))
        .iter()
        .map(|d| d["entity_id"].as_str().unwrap().to_string())
        .collect::<BTreeSet<_>>()
        .len();
    ensure!(claims.len() >= 12 && entity_count == 2, "fixture has {} claims, {entity_count} entities", claims.len());

    let oracle = ambig_oracle(fx.dir.path(), &fx.out(""));
    let accuracy = csv_rows(&fx.read_out("reports/accuracy.csv"));
    let errors = csv_rows(&fx.read_out("reports/errors.csv"));
    ensure!(accuracy.len() == 5 && errors.len() == 5, "expected four strategy rows");
    for (i, s) in Strategy::ALL.iter().enumerate() {
        let o = &oracle[s.as_str()];
        let modification = if *s == Strategy::Atomic { "-".to_string() } else { pct(o.modified, o.n, 1) };
        let want = vec![
            s.table_label().to_string(),
            pct(o.correct, o.n, 1),
            pct(o.correct_s, o.n_s, 1),
            pct(o.correct_ns, o.n_ns, 1),
            modification,
            oracle_length(&o.words),
        ];
        ensure!(accuracy[i + 1] == want, "{s} accuracy row {:?} != oracle {want:?}", accuracy[i + 1]);
        let mut want: Vec<String> = vec![s.table_label().to_string()];
        want.extend(o.errors.iter().map(|e| pct(*e, o.n, 1)));
        want.push(pct(o.n - o.correct, o.n, 1));
        ensure!(errors[i + 1] == want, "{s} error row {:?} != oracle {want:?}", errors[i + 1]);
    }

    // Integer counts from the library, rebuilt offline from the same records.
    let corpus = run::load_ambig_corpus(&fx.config).map_err(|e| e.to_string())?;
    let revisions: Vec<RevisedClaim> = read_jsonl(&fx.out("revisions.jsonl")).map_err(|e| e.to_string())?;
    let judgments = read_jsonl(&fx.out("judgments.jsonl")).map_err(|e| e.to_string())?;
    let evals = run::evaluations_from_records(&corpus, &revisions, &judgments).map_err(|e| e.to_string())?;
    let rows = molfact::ambigeval::accuracy_report(&evals, &Strategy::ALL);
    let errs = molfact::ambigeval::error_breakdown(&evals, &Strategy::ALL).map_err(|e| e.to_string())?;
    for (row, err) in rows.iter().zip(&errs) {
        let o = &oracle[row.strategy.as_str()];
        ensure!(
            (row.n, row.correct, row.correct_supported, row.correct_not_supported) == (o.n, o.correct, o.correct_s, o.correct_ns),
            "{} counts differ from oracle",
            row.strategy
        );
        let counts: Vec<usize> = ErrorCategory::ALL.iter().map(|c| err.counts.get(c).copied().unwrap_or(0)).collect();
        ensure!(counts == o.errors, "{} error counts {counts:?} != oracle {:?}", row.strategy, o.errors);
    }
    let atomic = &oracle["ATOMIC"];
    // Hand count of the fixture design: ATOMIC is right on 7 of 13 claims.
    ensure!((atomic.correct, atomic.n) == (7, 13), "ATOMIC {}/{}", atomic.correct, atomic.n);
    Ok(format!(
        "{} claims, 2 entities, 4 strategies match the recount ({} ms)",
        atomic.n,
        elapsed.as_millis()
    ))
}

fn error_row(strategy: Strategy, cells: [f64; 4], overall: f64) -> ErrorRow {
    ErrorRow {
        strategy,
        n: 0,
        counts: BTreeMap::new(),
        rates: ErrorCategory::ALL.iter().copied().zip(cells.map(|c| c / 100.0)).collect(),
        errors: 0,
        error_rate: overall / 100.0,
    }
}

fn accuracy_row(strategy: Strategy, cells: [f64; 3], modification: Option<f64>, length: (f64, f64)) -> AccuracyRow {
    AccuracyRow {
        strategy,
        n: 0,
        correct: 0,
        accuracy: cells[0] / 100.0,
        n_supported: 0,
        correct_supported: 0,
        accuracy_supported: cells[1] / 100.0,
        n_not_supported: 0,
        correct_not_supported: 0,
        accuracy_not_supported: cells[2] / 100.0,
        modification_rate: modification.map(|m| m / 100.0),
        length_mean: length.0,
        length_std: length.1,
    }
}

pub const PUBLISHED_TABLE_1: &str = "\
| Baseline | Potential Non-minimal | Auto Non-minimal |
| --- | --- | --- |
| SAFE-DECONTEXT | 8.49% | 3.94% |
| SIMPLE-DECONTEXT | 23.39% | 13.42% |
";

pub const PUBLISHED_TABLE_2: &str = "\
| Category | Minimal | Non-minimal |
| --- | --- | --- |
| SAFE-DECONTEXT | 56.2% | 43.8% |
| SIMPLE-DECONTEXT | 27.5% | 72.5% |
";

pub const PUBLISHED_TABLE_3: &str = "\
| Subset | Accuracy Overall | Accuracy SUPPORTED | Accuracy NOT_SUPPORTED | Modification Rate | Avg Length (# of words) |
| --- | --- | --- | --- | --- | --- |
| ATOMIC | 68.7% | 77.5% | 22.4% | - | 7.61±3.03 |
| SIMPLE-DECONTEXT | 76.2% | 84.3% | 33.6% | 99.5% | 15.55±5.65 |
| SAFE-DECONTEXT | 73.4% | 81.3% | 31.9% | 72.6% | 9.86±4.38 |
| MOLECULAR-DECONTEXT | 74.7% | 81.5% | 38.8% | 96.8% | 14.96±5.6 |
";

pub const PUBLISHED_TABLE_4: &str = "\
| Baseline | SUPPORTED / SUPPORTED: Multi-Evidence matched | SUPPORTED / SUPPORTED: Single-Evidence Wrong Entity | SUPPORTED / NOT_SUPPORTED: No Evidence matched | NOT_SUPPORTED / SUPPORTED: Single/Multiple Evidence matched | Overall |
| --- | --- | --- | --- | --- | --- |
| ATOMIC | 16.2% | 0.8% | 1.8% | 12.4% | 31.1% |
| SIMPLE-DECONTEXT | 7.9% | 1.5% | 3.9% | 10.6% | 23.8% |
| SAFE-DECONTEXT | 12.0% | 1.0% | 2.8% | 10.9% | 26.6% |
| MOLECULAR-DECONTEXT | 9.2% | 1.5% | 4.8% | 9.8% | 25.3% |
";

pub const PUBLISHED_TABLE_6: &str = "\
| Baseline Pair | Overlap |
| --- | --- |
| ATOM & SIMPLE-DECONTEXT | 7% |
| ATOM & SAFE-DECONTEXT | 44% |
| ATOM & MOLECULAR-DECONTEXT | 15% |
| SIMPLE-DECONTEXT & SAFE-DECONTEXT | 27% |
| SIMPLE-DECONTEXT & MOLECULAR-DECONTEXT | 36% |
| MOLECULAR-DECONTEXT & SAFE-DECONTEXT | 32% |
";

fn body(t: &report::Table) -> String {
    let md = t.to_markdown();
    match md.split_once("\n\n") {
        Some((_, rest)) if !t.caption.is_empty() => rest.to_string(),
        _ => md,
    }
}

pub fn table_shapes() -> Outcome {
    use Strategy::*;
    let t1 = report::minimality_table(&[
        MinimalityRow { strategy: Safe, potential_nonminimal: 0, auto_nonminimal: 0, potential_nonminimal_rate: 0.0849, auto_nonminimal_rate: 0.0394 },
        MinimalityRow { strategy: Simple, potential_nonminimal: 0, auto_nonminimal: 0, potential_nonminimal_rate: 0.2339, auto_nonminimal_rate: 0.1342 },
    ]);
    let human = |strategy, minimal: f64, non: f64| HumanMinimalityRow {
        strategy,
        annotated: 0,
        unannotated: 0,
        minimal: 0,
        non_minimal: 0,
        minimal_rate: minimal / 100.0,
        non_minimal_rate: non / 100.0,
        non_minimal_of_corpus: 0.0,
    };
    let t2 = report::human_minimality_table(&[human(Safe, 56.2, 43.8), human(Simple, 27.5, 72.5)]);
    let t3 = report::accuracy_table(&[
        accuracy_row(Atomic, [68.7, 77.5, 22.4], None, (7.61, 3.03)),
        accuracy_row(Simple, [76.2, 84.3, 33.6], Some(99.5), (15.55, 5.65)),
        accuracy_row(Safe, [73.4, 81.3, 31.9], Some(72.6), (9.86, 4.38)),
        accuracy_row(Molecular, [74.7, 81.5, 38.8], Some(96.8), (14.96, 5.6)),
    ]);
    let t4 = report::error_table(&[
        error_row(Atomic, [16.2, 0.8, 1.8, 12.4], 31.1),
        error_row(Simple, [7.9, 1.5, 3.9, 10.6], 23.8),
        error_row(Safe, [12.0, 1.0, 2.8, 10.9], 26.6),
        error_row(Molecular, [9.2, 1.5, 4.8, 9.8], 25.3),
    ]);
    let overlap = |first, second, v: f64| OverlapRow { first, second, n: 0, equivalent: 0, overlap: v / 100.0 };
    let t6 = report::overlap_table(&[
        overlap(Atomic, Simple, 7.0),
        overlap(Atomic, Safe, 44.0),
        overlap(Atomic, Molecular, 15.0),
        overlap(Simple, Safe, 27.0),
        overlap(Simple, Molecular, 36.0),
        overlap(Molecular, Safe, 32.0),
    ]);
    for (name, table, want) in [
        ("1", &t1, PUBLISHED_TABLE_1),
        ("2", &t2, PUBLISHED_TABLE_2),
        ("3", &t3, PUBLISHED_TABLE_3),
        ("4", &t4, PUBLISHED_TABLE_4),
        ("6", &t6, PUBLISHED_TABLE_6),
    ] {
        let got = body(table);
        ensure!(got == want, "table {name} renders as\n{got}\nexpected\n{want}");
        let csv = table.to_csv().map_err(|e| e.to_string())?;
        ensure!(csv.lines().count() == table.rows.len() + 1, "table {name} CSV row count");
    }
    Ok("tables 1, 2, 3, 4, 6 render cell-for-cell".into())
}

pub fn invariants() -> Outcome {
    let mut total = 0;
    let mut run = |name: &str, r: Result<u32, String>| -> Result<(), String> {
        total += r.map_err(|e| format!("{name}: {e}"))?;
        Ok(())
    };
    run("error partition", props::run_property(props::ambig_corpus(), props::partition_holds))?;
    run("subset-weighted accuracy", props::run_property(props::ambig_corpus(), props::subset_weighting_holds))?;
    run("auto within potential", props::run_property(props::fact_corpus(), props::auto_within_potential))?;
    run("overlap symmetry", props::run_property(props::overlap_corpus(), props::overlap_symmetric))?;
    run("ATOMIC identity", props::run_property(props::ambig_corpus(), props::atomic_identity_holds))?;
    run(
        "check threshold monotonicity",
        props::run_property((props::ambig_corpus(), 0.0f64..=1.0, 0.0f64..=1.0), props::check_threshold_monotone),
    )?;
    run(
        "entailment threshold monotonicity",
        props::run_property((props::fact_corpus(), 0.0f64..=1.0, 0.0f64..=1.0), props::entail_threshold_monotone),
    )?;
    Ok(format!("7 properties, {total} generated cases, no violations"))
}

/// Bytes of `manifest.json` and every report.
fn snapshot(fx: &Fixture) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let out = fx.out("");
    files.insert(PathBuf::from("manifest.json"), fs::read(out.join("manifest.json")).unwrap());
    for entry in fs::read_dir(out.join("reports")).unwrap() {
        let path = entry.unwrap().path();
        files.insert(path.strip_prefix(&out).unwrap().to_path_buf(), fs::read(&path).unwrap());
    }
    files
}

fn remove_intermediates(dir: &Path) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "jsonl") {
            fs::remove_file(path).unwrap();
        }
    }
}

pub fn determinism() -> Outcome {
    let mut compared = 0;
    for (name, command) in [("minimality", Command::Minimality), ("ambig", Command::AmbigEval), ("ambig", Command::Overlap)] {
        let fx = Fixture::new(name);
        timed_run(&fx, command)?;
        let first = snapshot(&fx);
        timed_run(&fx, command)?;
        ensure!(snapshot(&fx) == first, "{}: second run differs", command.as_str());
        remove_intermediates(&fx.out(""));
        fs::remove_dir_all(fx.out("reports")).unwrap();
        timed_run(&fx, command)?;
        ensure!(snapshot(&fx) == first, "{}: run after deleting intermediates differs", command.as_str());
        compared += first.len();
    }
    Ok(format!("3 commands x 3 runs, {compared} files byte-identical"))
}

fn oracle_norm(text: &str) -> String {
    let lower = text.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase();
    lower.trim_end_matches(['.', '!', '?']).trim_end().to_string()
}

/// Entailment scores straight from the fixture file, containment otherwise.
fn oracle_entail(path: &Path) -> impl Fn(&str, &str) -> f64 {
    let table: BTreeMap<(String, String), f64> = jsonl(path)
        .iter()
        .filter(|e| e["kind"] == "entail")
        .map(|e| {
            let key = |k: &str| e[k].as_str().unwrap().split_whitespace().collect::<Vec<_>>().join(" ");
            ((key("premise"), key("hypothesis")), e["score"].as_f64().unwrap())
        })
        .collect();
    move |p: &str, h: &str| {
        let key = (
            p.split_whitespace().collect::<Vec<_>>().join(" "),
            h.split_whitespace().collect::<Vec<_>>().join(" "),
        );
        table.get(&key).copied().unwrap_or_else(|| {
            let needle = oracle_norm(h);
            if !needle.is_empty() && oracle_norm(p).contains(&needle) { 1.0 } else { 0.0 }
        })
    }
}

fn fixture_responses() -> Result<Vec<Vec<AtomicClaim>>, String> {
    let fx = Fixture::new("minimality");
    let fc = ingest::ingest_factcheck_corpus(&fx.path("corpus.jsonl")).map_err(|e| e.to_string())?;
    let mut groups: Vec<Vec<AtomicClaim>> = fc.records.into_iter().map(|(_, c)| c).collect();
    let amb = Fixture::new("ambig");
    let corpus = run::load_ambig_corpus(&amb.config).map_err(|e| e.to_string())?;
    let mut by_response: BTreeMap<String, Vec<AtomicClaim>> = BTreeMap::new();
    for c in &corpus.claims {
        by_response.entry(c.response_id.clone()).or_default().push(c.atomic());
    }
    groups.extend(by_response.into_values());
    Ok(groups)
}

pub fn filters() -> Outcome {
    let groups = fixture_responses()?;
    let pairs: usize = groups.iter().map(|g| g.len() * (g.len() - 1)).sum();
    ensure!(pairs <= 400, "{pairs} pairs exceed the brute-force budget");

    // Substring filter.
    let mut excluded_total = 0;
    for claims in &groups {
        let forms: Vec<String> = claims.iter().map(|c| oracle_norm(&c.text)).collect();
        let related = |i: usize, j: usize| forms[i].contains(&forms[j]) || forms[j].contains(&forms[i]);
        for core in claims {
            let want: BTreeSet<String> = (0..claims.len())
                .filter(|&i| claims[i].claim_id != core.claim_id)
                .filter(|&i| (0..claims.len()).any(|j| j != i && related(i, j)))
                .map(|i| claims[i].claim_id.clone())
                .collect();
            let got = minimality::substring_excluded(core, claims);
            ensure!(got == want, "substring filter for {}: {got:?} != {want:?}", core.claim_id);
            excluded_total += got.len();
        }
    }
    ensure!(excluded_total > 0, "fixtures exercise no substring pair");

    // Key-fact similarity filter, every claim taken as the banned fact.
    let mfx = Fixture::new("minimality");
    let scores = mfx.path("scores.jsonl");
    let (entail, _) = FixtureScorer::pair_from_jsonl(&scores).map_err(|e| e.to_string())?;
    let entailer = Entailer::new(std::sync::Arc::new(entail), mfx.config.entailment_threshold());
    let oracle = oracle_entail(&scores);
    let threshold = mfx.config.entailment_threshold();
    let mut removed_total = 0;
    for claims in &groups {
        for banned in claims {
            let want: Vec<String> = claims
                .iter()
                .filter(|c| c.claim_id != banned.claim_id && oracle(&c.text, &banned.text) < threshold)
                .map(|c| c.claim_id.clone())
                .collect();
            let got: Vec<String> = minimality::filter_key_facts(&entailer, banned, claims)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|c| c.claim_id)
                .collect();
            ensure!(got == want, "key filter for banned {}: {got:?} != {want:?}", banned.claim_id);
            removed_total += claims.len() - 1 - got.len();
        }
    }
    ensure!(removed_total > 0, "fixtures exercise no key-fact removal");

    // Multi-fact detection with and without the substring filter, on the
    // recorded fixture revisions.
    timed_run(&mfx, Command::Minimality)?;
    let revisions: Vec<RevisedClaim> = read_jsonl(&mfx.out("revisions.jsonl")).map_err(|e| e.to_string())?;
    let mut grown = 0;
    for rev in &revisions {
        let claims = groups
            .iter()
            .find(|g| g.iter().any(|c| c.claim_id == rev.claim_id))
            .ok_or_else(|| format!("no claims for {}", rev.claim_id))?;
        let core = claims.iter().find(|c| c.claim_id == rev.claim_id).unwrap();
        let excluded = minimality::substring_excluded(core, claims);
        let core_ok = oracle(&rev.text, &core.text) >= threshold;
        let aux = |filtered: bool| -> BTreeSet<String> {
            claims
                .iter()
                .filter(|c| c.claim_id != core.claim_id && !(filtered && excluded.contains(&c.claim_id)))
                .filter(|c| oracle(&rev.text, &c.text) >= threshold)
                .map(|c| c.claim_id.clone())
                .collect()
        };
        for filtered in [true, false] {
            let got = minimality::find_multifact_with(&entailer, rev, claims, filtered)
                .map_err(|e| e.to_string())?
                .map(|r| r.entailed_aux.into_iter().map(|c| c.claim_id).collect::<BTreeSet<_>>())
                .unwrap_or_default();
            let want = if core_ok { aux(filtered) } else { BTreeSet::new() };
            ensure!(got == want, "{}/{} aux (filter {filtered}): {got:?} != {want:?}", rev.strategy, rev.claim_id);
        }
        let (on, off) = (aux(true), aux(false));
        ensure!(on.is_subset(&off), "substring filter added aux facts to {}", rev.claim_id);
        if core_ok && on.len() < off.len() {
            grown += 1;
        }
    }
    ensure!(grown > 0, "disabling the substring filter never grew a record");
    Ok(format!(
        "{pairs} ordered pairs; {excluded_total} substring exclusions, {removed_total} key removals, {grown} records grow without the filter"
    ))
}

pub const LIVE_CONFIG_ENV: &str = "MOLFACT_LIVE_CONFIG";

/// One claim through every strategy and judging against live providers.
pub fn live_smoke(config_path: &Path) -> Outcome {
    use molfact::decontext::{ReviseOptions, Reviser};
    use molfact::providers::CacheMode;

    let mut config = molfact::RunConfig::load(config_path).map_err(|e| e.to_string())?;
    config.cache_mode = CacheMode::LiveRecord;
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    config.replay_dir = scratch.path().join("replay");
    let pipeline = run::Pipeline::new(config).map_err(|e| e.to_string())?;
    let corpus = pipeline.ambig_corpus().map_err(|e| e.to_string())?;
    let claim = corpus.claims.first().ok_or("ambiguous corpus is empty")?;
    let response = corpus.response(&claim.response_id).ok_or("claim without response")?;
    let docs = molfact::ambigeval::documents_for(claim, &corpus.documents);
    let reviser = Reviser::new(pipeline.llm.clone(), ReviseOptions::default());
    for s in Strategy::ALL {
        let rev = reviser.revise(s, &claim.atomic(), response).map_err(|e| format!("{s}: {e}"))?;
        molfact::ambigeval::judge_claim(&pipeline.checker, claim, &rev, &docs).map_err(|e| format!("{s}: {e}"))?;
    }
    Ok(format!("{} revised and judged by all four strategies", claim.claim_id))
}
