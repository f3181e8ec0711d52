//! Contribution statements out of JATS-style article XML.

use std::borrow::Cow;
use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use quick_xml::escape::resolve_predefined_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use rayon::prelude::*;
use serde::Serialize;
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::records::{CorpusRecord, JsonlWriter};

/// Elements that sit inside running text and must not split words.
const INLINE: &[&[u8]] = &[
    b"italic",
    b"bold",
    b"sup",
    b"sub",
    b"sc",
    b"underline",
    b"monospace",
    b"xref",
    b"ext-link",
    b"named-content",
    b"styled-content",
    b"inline-formula",
    b"uri",
    b"email",
];

/// Headings whose text is dropped from captured sections.
const HEADINGS: &[&[u8]] = &[b"title", b"label"];

/// What one pass over a document found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub article_id: Option<String>,
    pub journal: Option<String>,
    pub year: Option<i32>,
    /// First `<fn fn-type="con">`.
    pub statement: Option<String>,
    /// First `<ack>`.
    pub acknowledgments: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Statement,
    Ack,
    Doi,
    OtherId,
    Journal,
    Year,
}

struct Capture {
    target: Target,
    depth: usize,
    text: String,
    /// Depth of a heading being skipped, if any.
    skipping: Option<usize>,
}

fn is_block(name: &[u8]) -> bool {
    !INLINE.contains(&name)
}

/// Collapse every whitespace run to one space and trim.
pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn xml_err<E: std::fmt::Display>(offset: u64, e: E) -> Error {
    Error::Xml {
        offset,
        message: e.to_string(),
    }
}

/// Parse a document and pull out the statement and metadata.
pub fn extract_document(text: &str) -> Result<Document> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;

    let mut doc = Document::default();
    let mut stack: Vec<Vec<u8>> = Vec::new();
    let mut captures: Vec<Capture> = Vec::new();
    let mut in_pub_date: Option<usize> = None;
    let mut other_id: Option<String> = None;

    loop {
        let event = reader
            .read_event()
            .map_err(|e| xml_err(reader.error_position(), e))?;
        match event {
            Event::Start(e) => {
                check_attributes(&e, reader.buffer_position())?;
                let name = e.local_name().as_ref().to_vec();
                open(&mut captures, &name, stack.len());
                stack.push(name);
                let depth = stack.len();
                if let Some(target) = start_target(&e, &doc, &captures, in_pub_date) {
                    captures.push(Capture {
                        target,
                        depth,
                        text: String::new(),
                        skipping: None,
                    });
                }
                if e.local_name().as_ref() == b"pub-date"
                    && in_pub_date.is_none()
                    && doc.year.is_none()
                {
                    in_pub_date = Some(depth);
                }
            }
            Event::Empty(e) => {
                check_attributes(&e, reader.buffer_position())?;
                boundary(&mut captures, e.local_name().as_ref());
            }
            Event::End(e) => {
                let depth = stack.len();
                let name = stack.pop().unwrap_or_default();
                debug_assert_eq!(name, e.local_name().as_ref());
                boundary(&mut captures, &name);
                for c in captures.iter_mut() {
                    if c.skipping == Some(depth) {
                        c.skipping = None;
                    }
                }
                if in_pub_date == Some(depth) {
                    in_pub_date = None;
                }
                while captures.last().is_some_and(|c| c.depth == depth) {
                    let done = captures.pop().expect("checked");
                    finish(&mut doc, &mut other_id, done);
                }
            }
            Event::Text(t) => {
                let s = t
                    .decode()
                    .map_err(|e| xml_err(reader.buffer_position(), e))?;
                push_text(&mut captures, &s);
            }
            Event::CData(t) => {
                let s = t
                    .decode()
                    .map_err(|e| xml_err(reader.buffer_position(), e))?;
                push_text(&mut captures, &s);
            }
            Event::GeneralRef(r) => {
                let resolved: Cow<'_, str> = match r.resolve_char_ref() {
                    Ok(Some(ch)) => Cow::Owned(ch.to_string()),
                    Ok(None) => {
                        let name = r
                            .decode()
                            .map_err(|e| xml_err(reader.buffer_position(), e))?;
                        match resolve_predefined_entity(&name) {
                            Some(s) => Cow::Borrowed(s),
                            // unknown named entity: keep as written
                            None => Cow::Owned(format!("&{name};")),
                        }
                    }
                    Err(e) => return Err(xml_err(reader.buffer_position(), e)),
                };
                push_text(&mut captures, &resolved);
            }
            Event::Eof => {
                if let Some(open) = stack.last() {
                    return Err(Error::Xml {
                        offset: reader.buffer_position(),
                        message: format!("unclosed element <{}>", String::from_utf8_lossy(open)),
                    });
                }
                break;
            }
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
        }
    }
    if doc.article_id.is_none() {
        doc.article_id = other_id;
    }
    Ok(doc)
}

/// Attributes are parsed lazily; force them so bad markup is reported.
fn check_attributes(e: &BytesStart<'_>, offset: u64) -> Result<()> {
    for attr in e.attributes() {
        attr.map_err(|err| xml_err(offset, err))?;
    }
    Ok(())
}

fn start_target(
    e: &BytesStart<'_>,
    doc: &Document,
    captures: &[Capture],
    in_pub_date: Option<usize>,
) -> Option<Target> {
    let busy = |t: Target| captures.iter().any(|c| c.target == t);
    match e.local_name().as_ref() {
        b"fn" if doc.statement.is_none() && !busy(Target::Statement) => {
            let is_con =
                matches!(e.try_get_attribute("fn-type"), Ok(Some(a)) if a.value.as_ref() == b"con");
            is_con.then_some(Target::Statement)
        }
        b"ack" if doc.acknowledgments.is_none() && !busy(Target::Ack) => Some(Target::Ack),
        b"article-id" if doc.article_id.is_none() => {
            let doi = matches!(e.try_get_attribute("pub-id-type"), Ok(Some(a)) if a.value.as_ref() == b"doi");
            Some(if doi { Target::Doi } else { Target::OtherId })
        }
        b"journal-title" if doc.journal.is_none() => Some(Target::Journal),
        b"year" if in_pub_date.is_some() && doc.year.is_none() => Some(Target::Year),
        _ => None,
    }
}

fn open(captures: &mut [Capture], name: &[u8], parent_depth: usize) {
    boundary(captures, name);
    if HEADINGS.contains(&name) {
        for c in captures
            .iter_mut()
            .filter(|c| matches!(c.target, Target::Statement | Target::Ack))
        {
            if c.skipping.is_none() {
                c.skipping = Some(parent_depth + 1);
            }
        }
    }
}

fn boundary(captures: &mut [Capture], name: &[u8]) {
    if is_block(name) {
        for c in captures.iter_mut() {
            c.text.push(' ');
        }
    }
}

fn push_text(captures: &mut [Capture], s: &str) {
    for c in captures.iter_mut().filter(|c| c.skipping.is_none()) {
        c.text.push_str(s);
    }
}

fn finish(doc: &mut Document, other_id: &mut Option<String>, c: Capture) {
    let text = collapse_whitespace(&c.text);
    if text.is_empty() {
        return;
    }
    match c.target {
        Target::Statement => doc.statement = Some(text),
        Target::Ack => doc.acknowledgments = Some(text),
        Target::Doi => doc.article_id = Some(text),
        Target::OtherId => {
            other_id.get_or_insert(text);
        }
        Target::Journal => doc.journal = Some(text),
        Target::Year => doc.year = text.parse().ok().filter(|y| *y >= 1900),
    }
}

/// Text of the first contribution footnote, if any.
pub fn extract_statement(document_text: &str) -> Result<Option<String>> {
    Ok(extract_document(document_text)?.statement)
}

/// Decode as UTF-8, replacing invalid sequences.
pub fn decode_lossy(path: &Path, bytes: &[u8]) -> String {
    match String::from_utf8_lossy(bytes) {
        Cow::Borrowed(s) => s.to_string(),
        Cow::Owned(s) => {
            warn!("{}: invalid UTF-8 replaced", path.display());
            s
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FileError {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub total: usize,
    pub extracted: usize,
    /// No statement, unreadable, malformed, or a duplicate id.
    pub skipped: usize,
    pub errors: Vec<FileError>,
    pub duplicates: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IngestOptions {
    /// Scan `<ack>` when no contribution footnote exists.
    pub ack_fallback: bool,
}

/// Directories expand to the `.xml` / `.nxml` files below them, sorted.
pub fn expand_inputs(paths: &[PathBuf]) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = WalkDir::new(p)
                .into_iter()
                .filter_map(|e| e.ok())
                .filter(|e| e.file_type().is_file())
                .map(|e| e.into_path())
                .filter(|p| p.extension().is_some_and(|x| x == "xml" || x == "nxml"))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    out
}

enum Outcome {
    Record(CorpusRecord),
    NoStatement,
    Failed(String),
}

fn ingest_file(path: &Path, opts: IngestOptions) -> Outcome {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => return Outcome::Failed(e.to_string()),
    };
    let text = decode_lossy(path, &bytes);
    let doc = match extract_document(&text) {
        Ok(d) => d,
        Err(e) => return Outcome::Failed(e.to_string()),
    };
    let statement = doc.statement.or_else(|| {
        let ack = doc.acknowledgments.filter(|_| opts.ack_fallback)?;
        let usable = contribnet_core::parse_statement(&ack).is_ok_and(|p| !p.pairs.is_empty());
        usable.then_some(ack)
    });
    let Some(statement) = statement else {
        return Outcome::NoStatement;
    };
    let article_id = doc.article_id.unwrap_or_else(|| {
        path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        )
    });
    Outcome::Record(CorpusRecord {
        article_id,
        journal: doc.journal,
        year: doc.year,
        statement,
    })
}

/// Extract every input and write `output` as JSONL. Files are processed in
/// parallel; records are written in input order.
pub fn build_corpus(
    inputs: &[PathBuf],
    output: &Path,
    opts: IngestOptions,
) -> Result<CorpusSummary> {
    let files = expand_inputs(inputs);
    let outcomes: Vec<Outcome> = files.par_iter().map(|p| ingest_file(p, opts)).collect();

    let mut writer = JsonlWriter::create(output)?;
    let mut summary = CorpusSummary {
        total: files.len(),
        ..Default::default()
    };
    let mut seen = HashSet::new();
    for (path, outcome) in files.iter().zip(outcomes) {
        match outcome {
            Outcome::Record(rec) => {
                if seen.insert(rec.article_id.clone()) {
                    writer.write(&rec)?;
                    summary.extracted += 1;
                } else {
                    warn!(
                        "{}: duplicate article id {}, skipped",
                        path.display(),
                        rec.article_id
                    );
                    summary.duplicates.push(rec.article_id);
                    summary.skipped += 1;
                }
            }
            Outcome::NoStatement => {
                debug!("{}: no contribution statement", path.display());
                summary.skipped += 1;
            }
            Outcome::Failed(message) => {
                warn!("{}: {message}", path.display());
                summary.errors.push(FileError {
                    path: path.clone(),
                    message,
                });
                summary.skipped += 1;
            }
        }
    }
    writer.finish()?;
    Ok(summary)
}
