//! Prompt template assets and rendering.
//!
//! Templates use `{name}` placeholders; `{{` and `}}` produce literal braces.
//! Built-in assets are compiled in from `templates/*.tmpl` and may be
//! overridden per run from a directory of files with the same names.

use std::collections::BTreeMap;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const DECOMPOSE: &str = "decompose";
pub const CHECKWORTHY: &str = "checkworthy";
pub const AMBIGUITY: &str = "ambiguity";
pub const MOLECULAR: &str = "molecular";
pub const SIMPLE_DECONTEXT: &str = "simple_decontext";
pub const SAFE_REVISION: &str = "safe_revision";
pub const SILVER_AMBIGUITY: &str = "silver_ambiguity";
pub const EVIDENCE: &str = "evidence";
pub const EVIDENCE_STRICT: &str = "evidence_strict";
pub const LLM_CHECK: &str = "llm_check";

const BUILTIN: &[(&str, &str)] = &[
    (DECOMPOSE, include_str!("../templates/decompose.tmpl")),
    (CHECKWORTHY, include_str!("../templates/checkworthy.tmpl")),
    (AMBIGUITY, include_str!("../templates/ambiguity.tmpl")),
    (MOLECULAR, include_str!("../templates/molecular.tmpl")),
    (SIMPLE_DECONTEXT, include_str!("../templates/simple_decontext.tmpl")),
    (SAFE_REVISION, include_str!("../templates/safe_revision.tmpl")),
    (SILVER_AMBIGUITY, include_str!("../templates/silver_ambiguity.tmpl")),
    (EVIDENCE, include_str!("../templates/evidence.tmpl")),
    (EVIDENCE_STRICT, include_str!("../templates/evidence_strict.tmpl")),
    (LLM_CHECK, include_str!("../templates/llm_check.tmpl")),
];

/// Appended to a structured-output prompt when the first reply did not parse.
pub const REPROMPT_NOTE: &str = "Your previous reply could not be parsed. Reply again with only the JSON object inside a ```json fenced block and nothing else.";

/// Template variables, kept ordered so rendering and hashing are stable.
pub type Vars = BTreeMap<String, String>;

pub fn vars<const N: usize>(pairs: [(&str, &str); N]) -> Vars {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[derive(Debug, Clone)]
pub struct Templates {
    sources: BTreeMap<String, String>,
}

impl Templates {
    pub fn builtin() -> Self {
        Templates {
            sources: BUILTIN
                .iter()
                .map(|(id, src)| (id.to_string(), src.to_string()))
                .collect(),
        }
    }

    /// Built-ins, with any `<id>.tmpl` found in `dir` taking precedence.
    pub fn with_overrides(dir: &Path) -> Result<Self> {
        let mut templates = Self::builtin();
        for (id, _) in BUILTIN {
            let path = dir.join(format!("{id}.tmpl"));
            if path.exists() {
                let src = std::fs::read_to_string(&path)
                    .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
                templates.sources.insert(id.to_string(), src);
            }
        }
        Ok(templates)
    }

    pub fn source(&self, id: &str) -> Result<&str> {
        self.sources
            .get(id)
            .map(String::as_str)
            .ok_or_else(|| Error::Template(format!("unknown template `{id}`")))
    }

    pub fn render(&self, id: &str, vars: &Vars) -> Result<String> {
        render(self.source(id)?, vars).map_err(|e| match e {
            Error::Template(msg) => Error::Template(format!("{id}: {msg}")),
            other => other,
        })
    }

    /// Prompt text for attempt `attempt` (0 = first try) of a template.
    pub fn render_attempt(&self, id: &str, vars: &Vars, attempt: u32) -> Result<String> {
        let mut prompt = self.render(id, vars)?;
        if attempt > 0 {
            prompt.push_str("\n\n");
            prompt.push_str(REPROMPT_NOTE);
        }
        Ok(prompt)
    }

    /// sha256 of each template source, keyed by id.
    pub fn hashes(&self) -> BTreeMap<String, String> {
        self.sources
            .iter()
            .map(|(id, src)| (id.clone(), hex::encode(Sha256::digest(src.as_bytes()))))
            .collect()
    }
}

pub fn render(source: &str, vars: &Vars) -> Result<String> {
    let mut out = String::with_capacity(source.len());
    let mut chars = source.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '{' if matches!(chars.peek(), Some((_, '{'))) => {
                chars.next();
                out.push('{');
            }
            '}' if matches!(chars.peek(), Some((_, '}'))) => {
                chars.next();
                out.push('}');
            }
            '{' => {
                let rest = &source[i + 1..];
                let end = rest
                    .find('}')
                    .ok_or_else(|| Error::Template(format!("unclosed placeholder at byte {i}")))?;
                let name = &rest[..end];
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(Error::Template(format!("bad placeholder `{{{name}}}`")));
                }
                let value = vars
                    .get(name)
                    .ok_or_else(|| Error::Template(format!("missing variable `{name}`")))?;
                out.push_str(value);
                for _ in 0..=end {
                    chars.next();
                }
            }
            '}' => return Err(Error::Template(format!("stray `}}` at byte {i}"))),
            _ => out.push(c),
        }
    }
    Ok(out)
}
