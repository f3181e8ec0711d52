//! Contribution statement tokenizing and task normalization.
//!
//! A statement is a run of sentences shaped like `Task phrase: TOKENS.`,
//! for example `Analyzed the data: EG ES FC JD JP MS.` Each sentence becomes
//! one [`RawPair`]; grouped phrases such as
//! `Contributed reagents/materials/analysis tools` stay a single task.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Words whose trailing period never ends a sentence.
const ABBREVIATIONS: &[&str] = &[
    "e.g", "i.e", "et al", "etc", "vs", "cf", "Dr", "Prof", "Fig", "Figs", "approx", "ca",
];

/// One `task: authors` sentence exactly as written, before normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPair {
    pub task: String,
    pub authors: Vec<String>,
}

/// Recoverable problems found while splitting a statement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SegmentIssue {
    /// A task phrase followed by a colon but no author tokens.
    NoAuthors { segment: usize, task: String },
    /// A colon with nothing before it.
    NoTask { segment: usize },
    /// The same token listed twice for one task; the repeat was dropped.
    DuplicateAuthor { segment: usize, author: String },
    /// No sentence boundary separates this segment's authors from the next
    /// task phrase, so both segments were discarded.
    Ambiguous { segment: usize },
}

impl fmt::Display for SegmentIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentIssue::NoAuthors { segment, task } => {
                write!(f, "segment {segment}: task {task:?} names no authors")
            }
            SegmentIssue::NoTask { segment } => write!(f, "segment {segment}: empty task phrase"),
            SegmentIssue::DuplicateAuthor { segment, author } => {
                write!(
                    f,
                    "segment {segment}: duplicate author token {author:?} dropped"
                )
            }
            SegmentIssue::Ambiguous { segment } => {
                write!(
                    f,
                    "segment {segment}: no sentence boundary before the next task"
                )
            }
        }
    }
}

/// Output of [`parse_statement`]: the extracted pairs plus segment-level issues.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StatementParse {
    pub pairs: Vec<RawPair>,
    pub issues: Vec<SegmentIssue>,
}

impl StatementParse {
    /// Issues that cost a whole segment (duplicate tokens are only warnings).
    pub fn failed_segments(&self) -> usize {
        self.issues
            .iter()
            .filter(|i| !matches!(i, SegmentIssue::DuplicateAuthor { .. }))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    Empty,
    /// No `task: authors` segment could be extracted.
    Unparseable {
        statement: String,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Empty => f.write_str("empty contribution statement"),
            ParseError::Unparseable { statement } => {
                write!(f, "no task: author segments found in {statement:?}")
            }
        }
    }
}

impl core::error::Error for ParseError {}

/// Split a contribution statement into `(task phrase, author tokens)` pairs.
///
/// Sentences end at a period followed by whitespace and a capital letter,
/// or at the end of the text. When several periods sit between two colons
/// (initials such as `J.D.`), the last one before the next task phrase is
/// the boundary. Author tokens are split on whitespace, commas and
/// semicolons; the connective `and` is dropped and a trailing period is
/// stripped from every token so `J.D.` and `J.D` name the same author.
pub fn parse_statement(statement: &str) -> Result<StatementParse, ParseError> {
    let text = statement.trim();
    if text.is_empty() {
        return Err(ParseError::Empty);
    }
    let colons: Vec<usize> = text.match_indices(':').map(|(i, _)| i).collect();
    if colons.is_empty() {
        return Err(ParseError::Unparseable {
            statement: statement.to_string(),
        });
    }

    let mut out = StatementParse::default();
    let mut task_start = Some(0usize);
    for (segment, &colon) in colons.iter().enumerate() {
        let (authors_end, next_start) = match colons.get(segment + 1) {
            Some(&next) => match find_boundary(text, colon + 1, next) {
                Some(period) => (period, Some(period + 1)),
                None => (next, None),
            },
            None => (text.len(), None),
        };

        let Some(start) = task_start else {
            // Previous segment swallowed this task phrase.
            out.issues.push(SegmentIssue::Ambiguous { segment });
            task_start = next_start;
            continue;
        };
        if colons.get(segment + 1).is_some() && next_start.is_none() {
            out.issues.push(SegmentIssue::Ambiguous { segment });
            task_start = None;
            continue;
        }
        task_start = next_start;

        let task = text[start..colon].trim();
        if task.is_empty() {
            out.issues.push(SegmentIssue::NoTask { segment });
            continue;
        }
        let authors = tokenize_authors(&text[colon + 1..authors_end], segment, &mut out.issues);
        if authors.is_empty() {
            out.issues.push(SegmentIssue::NoAuthors {
                segment,
                task: task.to_string(),
            });
            continue;
        }
        out.pairs.push(RawPair {
            task: task.to_string(),
            authors,
        });
    }

    if out.pairs.is_empty() {
        return Err(ParseError::Unparseable {
            statement: statement.to_string(),
        });
    }
    Ok(out)
}

/// Byte offset of the sentence-ending period in `text[from..to]`, if any.
fn find_boundary(text: &str, from: usize, to: usize) -> Option<usize> {
    let bytes = text.as_bytes();
    let mut strict = None;
    let mut loose = None;
    for p in from..to {
        let b = bytes[p];
        if b != b'.' && b != b';' {
            continue;
        }
        let rest = &text[p + 1..to];
        let trimmed = rest.trim_start();
        if trimmed.len() == rest.len() || trimmed.is_empty() {
            continue;
        }
        if b == b'.' && is_abbreviation(&text[from..p]) {
            continue;
        }
        loose = Some(p);
        if b == b'.' && trimmed.chars().next().is_some_and(char::is_uppercase) {
            strict = Some(p);
        }
    }
    strict.or(loose)
}

fn is_abbreviation(before: &str) -> bool {
    ABBREVIATIONS.iter().any(|abbr| {
        before.strip_suffix(abbr).is_some_and(|head| {
            head.chars()
                .next_back()
                .is_none_or(|c| c.is_whitespace() || c == '(')
        })
    })
}

fn tokenize_authors(region: &str, segment: usize, issues: &mut Vec<SegmentIssue>) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut authors = Vec::new();
    for raw in region.split(|c: char| c.is_whitespace() || c == ',' || c == ';') {
        let token = raw.trim_end_matches('.');
        // all-caps "AND" is someone's initials, not the connective
        if token.is_empty() || token == "and" || token == "And" || token == "&" {
            continue;
        }
        if seen.insert(token) {
            authors.push(token.to_string());
        } else {
            issues.push(SegmentIssue::DuplicateAuthor {
                segment,
                author: token.to_string(),
            });
        }
    }
    authors
}

/// Lowercase, trim, collapse whitespace and strip terminal punctuation.
pub fn clean_task(raw: &str) -> String {
    let lowered = raw.to_lowercase();
    let mut out = String::with_capacity(lowered.len());
    for word in lowered.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    let end = out
        .trim_end_matches(|c: char| {
            matches!(c, '.' | ',' | ';' | ':' | '!' | '?') || c.is_whitespace()
        })
        .len();
    out.truncate(end);
    out
}

/// Clean `raw` and map it through the lexicon's synonym table.
pub fn normalize_task(raw: &str, lexicon: &TaskLexicon) -> String {
    lexicon.normalize(raw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconError {
    EmptyEntry,
    /// The same surface form mapped to two different labels.
    ConflictingKey {
        key: String,
    },
    /// A canonical label is itself a surface form for another label.
    ChainedSynonym {
        label: String,
    },
    CommonFiveNotCanonical {
        label: String,
    },
    DuplicateCommon {
        label: String,
    },
}

impl fmt::Display for LexiconError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconError::EmptyEntry => f.write_str("empty surface form or label"),
            LexiconError::ConflictingKey { key } => write!(f, "surface form {key:?} mapped twice"),
            LexiconError::ChainedSynonym { label } => {
                write!(
                    f,
                    "canonical label {label:?} is also mapped to another label"
                )
            }
            LexiconError::CommonFiveNotCanonical { label } => {
                write!(f, "common task {label:?} is not a canonical label")
            }
            LexiconError::DuplicateCommon { label } => {
                write!(f, "common task {label:?} listed twice")
            }
        }
    }
}

impl core::error::Error for LexiconError {}

/// The five tasks every statement template offers.
pub const DEFAULT_COMMON_FIVE: [&str; 5] = [
    "conceived and designed the experiments",
    "performed the experiments",
    "analyzed the data",
    "contributed reagents/materials/analysis tools",
    "wrote the paper",
];

/// Synonym table from cleaned surface forms to canonical task labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskLexicon {
    synonyms: BTreeMap<String, String>,
    common_five: [String; 5],
}

impl TaskLexicon {
    pub fn new<I, K, V>(synonyms: I, common_five: [&str; 5]) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut map = BTreeMap::new();
        for (key, label) in synonyms {
            let key = clean_task(key.as_ref());
            let label = clean_task(label.as_ref());
            if key.is_empty() || label.is_empty() {
                return Err(LexiconError::EmptyEntry);
            }
            match map.get(&key) {
                Some(existing) if *existing != label => {
                    return Err(LexiconError::ConflictingKey { key })
                }
                _ => {
                    map.insert(key, label);
                }
            }
        }
        for label in map.values() {
            if map.get(label).is_some_and(|target| target != label) {
                return Err(LexiconError::ChainedSynonym {
                    label: label.clone(),
                });
            }
        }

        let common_five = common_five.map(clean_task);
        for (i, label) in common_five.iter().enumerate() {
            if label.is_empty() {
                return Err(LexiconError::EmptyEntry);
            }
            if map.get(label).is_some_and(|target| target != label) {
                return Err(LexiconError::CommonFiveNotCanonical {
                    label: label.clone(),
                });
            }
            if common_five[..i].contains(label) {
                return Err(LexiconError::DuplicateCommon {
                    label: label.clone(),
                });
            }
        }
        Ok(Self {
            synonyms: map,
            common_five,
        })
    }

    /// No synonyms; the default common five.
    pub fn identity() -> Self {
        Self::new(core::iter::empty::<(&str, &str)>(), DEFAULT_COMMON_FIVE)
            .expect("default common five are canonical")
    }

    pub fn normalize(&self, raw: &str) -> String {
        let cleaned = clean_task(raw);
        match self.synonyms.get(&cleaned) {
            Some(label) => label.clone(),
            None => cleaned,
        }
    }

    pub fn synonyms(&self) -> &BTreeMap<String, String> {
        &self.synonyms
    }

    pub fn common_five(&self) -> &[String; 5] {
        &self.common_five
    }

    /// Position of `label` among the common five.
    pub fn common_index(&self, label: &str) -> Option<usize> {
        self.common_five.iter().position(|c| c == label)
    }

    /// Distinct canonical labels named by the table and the common five.
    pub fn canonical_labels(&self) -> BTreeSet<&str> {
        self.synonyms
            .values()
            .chain(self.common_five.iter())
            .map(String::as_str)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementError {
    NoPairs,
    EmptyTask,
    EmptyAuthors { task: String },
    DuplicateAuthor { task: String, author: String },
}

impl fmt::Display for StatementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatementError::NoPairs => f.write_str("statement has no author-task pairs"),
            StatementError::EmptyTask => f.write_str("empty task label"),
            StatementError::EmptyAuthors { task } => write!(f, "task {task:?} has no authors"),
            StatementError::DuplicateAuthor { task, author } => {
                write!(f, "task {task:?} lists author {author:?} twice")
            }
        }
    }
}

impl core::error::Error for StatementError {}

/// One normalized row: a canonical task and the distinct tokens that performed it.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuthorTaskPair {
    task: String,
    authors: Vec<String>,
}

impl AuthorTaskPair {
    pub fn new(task: impl Into<String>, authors: Vec<String>) -> Result<Self, StatementError> {
        let task = task.into();
        if task.is_empty() {
            return Err(StatementError::EmptyTask);
        }
        if authors.is_empty() || authors.iter().any(String::is_empty) {
            return Err(StatementError::EmptyAuthors { task });
        }
        let mut seen = BTreeSet::new();
        for a in &authors {
            if !seen.insert(a.as_str()) {
                return Err(StatementError::DuplicateAuthor {
                    task,
                    author: a.clone(),
                });
            }
        }
        Ok(Self { task, authors })
    }

    pub fn task(&self) -> &str {
        &self.task
    }

    pub fn authors(&self) -> &[String] {
        &self.authors
    }
}

/// All pairs of one article, with tasks already normalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedStatement {
    article_id: String,
    pairs: Vec<AuthorTaskPair>,
    author_set: BTreeSet<String>,
}

impl ParsedStatement {
    pub fn new(
        article_id: impl Into<String>,
        pairs: Vec<AuthorTaskPair>,
    ) -> Result<Self, StatementError> {
        if pairs.is_empty() {
            return Err(StatementError::NoPairs);
        }
        let author_set = pairs
            .iter()
            .flat_map(|p| p.authors.iter().cloned())
            .collect();
        Ok(Self {
            article_id: article_id.into(),
            pairs,
            author_set,
        })
    }

    /// Normalize the raw pairs of one statement through `lexicon`.
    pub fn from_raw(
        article_id: impl Into<String>,
        raw: &[RawPair],
        lexicon: &TaskLexicon,
    ) -> Result<Self, StatementError> {
        let pairs = raw
            .iter()
            .map(|p| AuthorTaskPair::new(lexicon.normalize(&p.task), p.authors.clone()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(article_id, pairs)
    }

    pub fn article_id(&self) -> &str {
        &self.article_id
    }

    pub fn pairs(&self) -> &[AuthorTaskPair] {
        &self.pairs
    }

    pub fn author_set(&self) -> &BTreeSet<String> {
        &self.author_set
    }
}
