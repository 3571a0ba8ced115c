//! Claim decontextualization for fact verification.
//!
//! Responses are decomposed into atomic claims, each claim is rewritten by one
//! of four strategies (kept atomic, simple decontextualization, SAFE-style
//! revision, or two-stage molecular rewriting), and the rewrites are audited:
//!
//! - [`minimality`] measures how often a rewrite adds facts that make it
//!   unverifiable against evidence that supports the original claim;
//! - [`ambigeval`] checks rewrites against documents about several entities
//!   sharing one name and scores whether support comes from the right one.
//!
//! Model access goes through the traits in [`providers`]. Every request can
//! be recorded into and replayed from a content-addressed store, so complete
//! runs are reproducible offline.

pub mod ambigeval;
pub mod config;
pub mod decomposition;
pub mod decontext;
pub mod error;
pub mod ingest;
pub mod minimality;
pub mod model;
pub mod parse;
pub mod providers;
pub mod report;
pub mod run;
pub mod seed;
pub mod templates;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use model::{AtomicClaim, EvidenceDocument, Judgment, Label, ModelResponse, RevisedClaim, Strategy};
pub use run::{run, Command, Manifest};
