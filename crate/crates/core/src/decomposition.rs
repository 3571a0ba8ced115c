//! Breaking a response into atomic claims.
//!
//! The response is split into sentences and each sentence is decomposed by
//! the `decompose` prompt, with the whole response supplied as context. The
//! reply is read as one claim per line after list markers are stripped.

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{normalize_text, AtomicClaim, ModelResponse};
use crate::parse::strip_list_marker;
use crate::providers::Llm;
use crate::templates::{self, vars};

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "vs", "etc", "inc", "ltd", "co",
    "corp", "no", "vol", "fig", "gen", "col", "lt", "sgt", "capt", "gov", "sen", "rep", "rev",
    "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec", "approx",
    "e.g", "i.e", "u.s", "u.k", "a.m", "p.m",
];

fn is_abbreviation(word: &str) -> bool {
    let w = word
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .to_lowercase();
    if w.chars().count() == 1 && w.chars().all(char::is_alphabetic) {
        // Initials such as "J. R. R. Tolkien".
        return true;
    }
    ABBREVIATIONS.contains(&w.as_str())
}

/// Split text into sentences at `.`, `!` or `?` followed by whitespace and
/// an upper-case letter, digit, quote or bracket. Periods that end a known
/// abbreviation or an initial do not split.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        let (_, c) = chars[i];
        if matches!(c, '.' | '!' | '?') {
            // Absorb closing quotes and brackets.
            let mut end = i + 1;
            while end < chars.len() && matches!(chars[end].1, '"' | '\'' | ')' | ']' | '”' | '’') {
                end += 1;
            }
            let mut next = end;
            while next < chars.len() && chars[next].1.is_whitespace() {
                next += 1;
            }
            let at_gap = next > end;
            let opens_sentence = next >= chars.len()
                || chars[next].1.is_uppercase()
                || chars[next].1.is_ascii_digit()
                || matches!(chars[next].1, '"' | '\'' | '(' | '[' | '“' | '‘');
            let abbreviated = c == '.' && {
                let byte_end = chars[i].0;
                let word = text[start..byte_end].split_whitespace().last().unwrap_or("");
                is_abbreviation(word)
            };
            if (at_gap || next >= chars.len()) && opens_sentence && !abbreviated {
                let byte_end = if end < chars.len() { chars[end].0 } else { text.len() };
                let sentence = normalize_text(&text[start..byte_end]);
                if !sentence.is_empty() {
                    sentences.push(sentence);
                }
                start = byte_end;
                i = next;
                continue;
            }
        }
        i += 1;
    }
    let tail = normalize_text(&text[start..]);
    if !tail.is_empty() {
        sentences.push(tail);
    }
    sentences
}

/// Claim lines from a decomposition reply.
pub fn parse_claim_lines(reply: &str) -> Vec<String> {
    reply
        .lines()
        .map(|line| normalize_text(strip_list_marker(line)))
        .filter(|line| !line.is_empty() && !line.ends_with(':') && !line.starts_with("```"))
        .collect()
}

#[derive(Deserialize)]
struct CheckWorthy {
    checkworthy: bool,
}

#[derive(Clone)]
pub struct Decomposer {
    llm: Llm,
    check_worthiness: bool,
}

impl Decomposer {
    pub fn new(llm: Llm) -> Self {
        Decomposer {
            llm,
            check_worthiness: false,
        }
    }

    /// Also drop claims the model judges not check-worthy. Off by default.
    pub fn with_check_worthiness(mut self, enabled: bool) -> Self {
        self.check_worthiness = enabled;
        self
    }

    pub fn extract_atomic_facts(&self, response: &ModelResponse) -> Result<Vec<AtomicClaim>> {
        if response.text.trim().is_empty() {
            return Err(Error::InvalidClaim(format!(
                "response {} has empty text",
                response.response_id
            )));
        }
        let sentences = split_sentences(&response.text);
        let per_sentence: Vec<Vec<String>> = sentences
            .par_iter()
            .map(|sentence| {
                let v = vars([("sentence", sentence.as_str()), ("response", response.text.as_str())]);
                let reply = self.llm.ask(templates::DECOMPOSE, &v)?;
                let facts = parse_claim_lines(&reply);
                if !self.check_worthiness {
                    return Ok(facts);
                }
                let mut kept = Vec::with_capacity(facts.len());
                for fact in facts {
                    let verdict: CheckWorthy = self
                        .llm
                        .ask_json(templates::CHECKWORTHY, &vars([("claim", fact.as_str())]))?;
                    if verdict.checkworthy {
                        kept.push(fact);
                    }
                }
                Ok(kept)
            })
            .collect::<Result<_>>()?;

        let claims: Vec<AtomicClaim> = per_sentence
            .into_iter()
            .flatten()
            .enumerate()
            .map(|(ordinal, text)| AtomicClaim {
                claim_id: AtomicClaim::make_id(&response.response_id, ordinal),
                response_id: response.response_id.clone(),
                text,
                ordinal,
                human_label: None,
                subject_hint: None,
            })
            .collect();
        if claims.is_empty() {
            return Err(Error::MalformedResponse(format!(
                "decomposition of {} produced no claims",
                response.response_id
            )));
        }
        Ok(claims)
    }
}
