//! CSV and markdown renderings of the result tables.
//!
//! Percentages follow the published layout: two decimals for the minimality
//! rates, one decimal for the human split, accuracy and error tables, whole
//! numbers for overlap. Lengths print as `mean±std` with trailing zeros
//! dropped.

use serde::{Deserialize, Serialize};

use crate::ambigeval::{AccuracyRow, ErrorCategory, ErrorRow, OverlapRow, SwitchRow};
use crate::error::{Error, Result};
use crate::minimality::{HumanMinimalityRow, MinimalityRow};
use crate::model::Strategy;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub caption: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io {
            context: format!("writing {} as CSV", self.name),
            source: std::io::Error::other(e),
        };
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            context: format!("writing {} as CSV", self.name),
            source: std::io::Error::other(e.to_string()),
        })?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 cells is UTF-8"))
    }

    pub fn to_markdown(&self) -> String {
        let line = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
        let mut out = String::new();
        if !self.caption.is_empty() {
            out.push_str(&format!("{}\n\n", self.caption));
        }
        out.push_str(&line(&self.header));
        out.push_str(&line(&vec!["---".to_string(); self.header.len()]));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }
}

/// A fraction as a percentage with `decimals` places.
pub fn percent(fraction: f64, decimals: usize) -> String {
    format!("{:.*}%", decimals, fraction * 100.0)
}

fn trimmed(value: f64) -> String {
    let s = format!("{value:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// `mean±std` with at most two decimals and no trailing zeros.
pub fn mean_pm_std(mean: f64, std: f64) -> String {
    format!("{}±{}", trimmed(mean), trimmed(std))
}

/// Strategy name as used in overlap pair labels.
pub fn pair_label(strategy: Strategy) -> &'static str {
    match strategy {
        Strategy::Atomic => "ATOM",
        other => other.table_label(),
    }
}

pub fn minimality_table(rows: &[MinimalityRow]) -> Table {
    Table {
        name: "minimality".into(),
        caption: "Share of all claims that are potential and auto non-minimal.".into(),
        header: vec!["Baseline".into(), "Potential Non-minimal".into(), "Auto Non-minimal".into()],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.strategy.table_label().to_string(),
                    percent(r.potential_nonminimal_rate, 2),
                    percent(r.auto_nonminimal_rate, 2),
                ]
            })
            .collect(),
    }
}

pub fn human_minimality_table(rows: &[HumanMinimalityRow]) -> Table {
    Table {
        name: "human_minimality".into(),
        caption: "Human split of the auto non-minimal subset.".into(),
        header: vec!["Category".into(), "Minimal".into(), "Non-minimal".into()],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.strategy.table_label().to_string(),
                    percent(r.minimal_rate, 1),
                    percent(r.non_minimal_rate, 1),
                ]
            })
            .collect(),
    }
}

pub fn accuracy_table(rows: &[AccuracyRow]) -> Table {
    Table {
        name: "accuracy".into(),
        caption: "Accuracy of each revision strategy against the ambiguous document set.".into(),
        header: vec![
            "Subset".into(),
            "Accuracy Overall".into(),
            "Accuracy SUPPORTED".into(),
            "Accuracy NOT_SUPPORTED".into(),
            "Modification Rate".into(),
            "Avg Length (# of words)".into(),
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.strategy.table_label().to_string(),
                    percent(r.accuracy, 1),
                    percent(r.accuracy_supported, 1),
                    percent(r.accuracy_not_supported, 1),
                    r.modification_rate.map_or_else(|| "-".to_string(), |m| percent(m, 1)),
                    mean_pm_std(r.length_mean, r.length_std),
                ]
            })
            .collect(),
    }
}

pub fn error_table(rows: &[ErrorRow]) -> Table {
    Table {
        name: "errors".into(),
        caption: "Errors by human label / predicted label / matching type, as a share of all claims.".into(),
        header: vec![
            "Baseline".into(),
            "SUPPORTED / SUPPORTED: Multi-Evidence matched".into(),
            "SUPPORTED / SUPPORTED: Single-Evidence Wrong Entity".into(),
            "SUPPORTED / NOT_SUPPORTED: No Evidence matched".into(),
            "NOT_SUPPORTED / SUPPORTED: Single/Multiple Evidence matched".into(),
            "Overall".into(),
        ],
        rows: rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.strategy.table_label().to_string()];
                cells.extend(ErrorCategory::ALL.iter().map(|c| percent(r.rate(*c), 1)));
                cells.push(percent(r.error_rate, 1));
                cells
            })
            .collect(),
    }
}

pub fn overlap_table(rows: &[OverlapRow]) -> Table {
    Table {
        name: "overlap".into(),
        caption: "Information overlap between strategies by bidirectional entailment.".into(),
        header: vec!["Baseline Pair".into(), "Overlap".into()],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    format!("{} & {}", pair_label(r.first), pair_label(r.second)),
                    percent(r.overlap, 0),
                ]
            })
            .collect(),
    }
}

/// Plot-ready switch-point table; fractions are written unformatted.
pub fn switch_point_table(rows: &[SwitchRow]) -> Table {
    Table {
        name: "switch_point".into(),
        caption: String::new(),
        header: ["strategy", "offset", "n", "correct", "accuracy", "overall_accuracy"]
            .map(String::from)
            .to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.strategy.clone(),
                    r.offset.to_string(),
                    r.n.to_string(),
                    r.correct.to_string(),
                    format!("{:.6}", r.accuracy),
                    format!("{:.6}", r.overall_accuracy),
                ]
            })
            .collect(),
    }
}
