//! The tab-separated task lexicon file.
//!
//! ```text
//! # comment
//! wrote the manuscript<TAB>wrote the paper
//! [common_five]
//! conceived and designed the experiments
//! ...
//! ```

use std::fs;
use std::path::Path;

use contribnet_core::statement::TaskLexicon;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// The lexicon shipped with the tool.
pub const DEFAULT_LEXICON: &str = include_str!("../data/default_lexicon.tsv");

/// A lexicon together with the fingerprint of the text it came from.
#[derive(Debug, Clone)]
pub struct LoadedLexicon {
    pub lexicon: TaskLexicon,
    pub fingerprint: String,
}

impl LoadedLexicon {
    pub fn default_lexicon() -> Self {
        Self::from_text(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Ok(Self {
            lexicon: parse_lexicon(text)?,
            fingerprint: fingerprint(text.as_bytes()),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// `path` if given, the bundled lexicon otherwise.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default_lexicon()), Self::load)
    }
}

/// Hex SHA-256 of `bytes`.
pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

enum Section {
    Synonyms,
    CommonFive,
}

pub fn parse_lexicon(text: &str) -> Result<TaskLexicon> {
    let mut synonyms = Vec::new();
    let mut common: Vec<(usize, String)> = Vec::new();
    let mut section = Section::Synonyms;
    let mut saw_common = false;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.starts_with('[') {
            section = match line {
                "[common_five]" if !saw_common => {
                    saw_common = true;
                    Section::CommonFive
                }
                "[common_five]" => return Err(lex_err(line_no, "second [common_five] section")),
                "[synonyms]" => Section::Synonyms,
                other => return Err(lex_err(line_no, format!("unknown section {other}"))),
            };
            continue;
        }
        match section {
            Section::Synonyms => {
                let (surface, label) = raw
                    .split_once('\t')
                    .ok_or_else(|| lex_err(line_no, "expected surface form<TAB>canonical label"))?;
                if surface.trim().is_empty() || label.trim().is_empty() || label.contains('\t') {
                    return Err(lex_err(line_no, "expected exactly two non-empty columns"));
                }
                synonyms.push((surface.to_string(), label.to_string()));
            }
            Section::CommonFive => common.push((line_no, line.to_string())),
        }
    }

    if !saw_common {
        return Err(lex_err(
            text.lines().count().max(1),
            "missing [common_five] section",
        ));
    }
    if common.len() != 5 {
        let line = common.get(5).map_or(text.lines().count(), |(l, _)| *l);
        return Err(lex_err(
            line,
            format!("[common_five] lists {} labels, need 5", common.len()),
        ));
    }
    let five: [&str; 5] = std::array::from_fn(|i| common[i].1.as_str());
    Ok(TaskLexicon::new(synonyms, five)?)
}

fn lex_err(line: usize, message: impl Into<String>) -> Error {
    Error::Lexicon {
        line,
        message: message.into(),
    }
}
