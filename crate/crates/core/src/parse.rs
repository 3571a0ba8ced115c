//! Helpers for pulling usable content out of raw model text.

use crate::model::normalize_text;

/// Contents of every ```-fenced block, in order. An optional info string
/// (e.g. `json`) after the opening fence is dropped.
fn fenced_blocks(text: &str) -> Vec<&str> {
    let mut blocks = Vec::new();
    let mut rest = text;
    while let Some(start) = rest.find("```") {
        let after = &rest[start + 3..];
        let body_start = after.find('\n').map(|i| i + 1).unwrap_or(0);
        let info = &after[..body_start];
        // A fence like ```Acorns is a company.``` on one line has no info string.
        let (body, consumed) = if info.trim().chars().all(|c| c.is_ascii_alphanumeric()) {
            match after[body_start..].find("```") {
                Some(end) => (&after[body_start..body_start + end], body_start + end + 3),
                None => break,
            }
        } else {
            match after.find("```") {
                Some(end) => (&after[..end], end + 3),
                None => break,
            }
        };
        blocks.push(body);
        rest = &after[consumed..];
    }
    blocks
}

/// The JSON object a structured prompt asked for: the first fenced block that
/// holds one, otherwise the outermost `{...}` span of the whole reply.
pub fn extract_json_object(text: &str) -> Option<&str> {
    for block in fenced_blocks(text) {
        if let Some(obj) = brace_span(block) {
            return Some(obj);
        }
    }
    brace_span(text)
}

fn brace_span(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let end = text.rfind('}')?;
    (end > start).then(|| &text[start..=end])
}

/// Remove a leading bullet or enumeration marker: "- ", "* ", "• ", "1. ", "2) ".
pub fn strip_list_marker(line: &str) -> &str {
    let t = line.trim_start();
    for marker in ["- ", "* ", "• ", "– "] {
        if let Some(rest) = t.strip_prefix(marker) {
            return rest.trim_start();
        }
    }
    let digits = t.chars().take_while(char::is_ascii_digit).count();
    if digits > 0 {
        let rest = &t[digits..];
        if let Some(rest) = rest.strip_prefix(". ").or_else(|| rest.strip_prefix(") ")) {
            return rest.trim_start();
        }
    }
    t
}

fn strip_wrapping_quotes(text: &str) -> &str {
    let mut t = text.trim();
    loop {
        let stripped = [('"', '"'), ('\'', '\''), ('“', '”'), ('`', '`')]
            .iter()
            .find_map(|(open, close)| {
                t.strip_prefix(*open)
                    .and_then(|s| s.strip_suffix(*close))
                    .filter(|inner| !inner.contains(*open) && !inner.contains(*close))
            });
        match stripped {
            Some(inner) if !inner.trim().is_empty() => t = inner.trim(),
            _ => return t,
        }
    }
}

/// A single revised statement from a free-text reply: the last fenced block
/// when there is one, then stripped of list markers, labels like
/// "Revised claim:", and wrapping quotes.
pub fn extract_statement(text: &str) -> String {
    let body = fenced_blocks(text).last().copied().unwrap_or(text);
    let joined = normalize_text(body);
    let mut s = strip_list_marker(&joined);
    for label in [
        "revised statement:",
        "revised claim:",
        "decontextualized claim:",
        "rewritten claim:",
        "molecular claim:",
        "claim:",
    ] {
        if let Some(rest) = s.get(..label.len()).filter(|head| head.eq_ignore_ascii_case(label)).map(|_| &s[label.len()..]) {
            s = rest.trim_start();
            break;
        }
    }
    strip_wrapping_quotes(s).to_string()
}
