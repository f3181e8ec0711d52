//! Files, formats and the command-line pipeline around `contribnet-core`.
//!
//! Stages exchange line-delimited JSON:
//!
//! ```text
//! article XML --ingest--> corpus.jsonl --parse--> parsed.jsonl
//!     --nullmodel--> null_*.jsonl --analyze--> CSV / JSON report
//! ```
#![deny(unsafe_code)]

pub mod analyze;
pub mod config;
pub mod error;
pub mod graphdump;
pub mod ingest;
pub mod lexicon;
pub mod manifest;
pub mod nullrun;
pub mod parse;
pub mod pipeline;
pub mod records;

pub use contribnet_core as core;
pub use error::{Error, Result};
