//! `parse`: corpus records to normalized author-task pairs.

use std::path::Path;

use contribnet_core::statement::{
    parse_statement, AuthorTaskPair, ParsedStatement, SegmentIssue, TaskLexicon,
};
use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::lexicon::LoadedLexicon;
use crate::records::{read_jsonl, CorpusRecord, JsonlWriter, ParsedRecord};

/// Counters for one parse run. Merging is associative and commutative up to
/// the order of the line lists, which are kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseReport {
    /// Non-blank input lines.
    pub lines: usize,
    pub parsed: usize,
    /// Well-formed records whose statement yielded no pair.
    pub failed: usize,
    /// Lines that are not valid corpus records.
    pub malformed: usize,
    pub segments_parsed: usize,
    pub segments_failed: usize,
    pub failed_lines: Vec<usize>,
    pub malformed_lines: Vec<usize>,
}

impl ParseReport {
    pub fn merge(mut self, other: ParseReport) -> ParseReport {
        self.lines += other.lines;
        self.parsed += other.parsed;
        self.failed += other.failed;
        self.malformed += other.malformed;
        self.segments_parsed += other.segments_parsed;
        self.segments_failed += other.segments_failed;
        self.failed_lines.extend(other.failed_lines);
        self.failed_lines.sort_unstable();
        self.malformed_lines.extend(other.malformed_lines);
        self.malformed_lines.sort_unstable();
        self
    }

    /// Every input line is accounted for exactly once.
    pub fn reconciles(&self) -> bool {
        self.lines == self.parsed + self.failed + self.malformed
    }
}

/// Parse and normalize one record. Pairs whose task normalizes to nothing
/// count as failed segments.
pub fn parse_record(
    record: &CorpusRecord,
    lexicon: &TaskLexicon,
) -> (Option<ParsedStatement>, ParseReport) {
    let mut report = ParseReport {
        lines: 1,
        ..Default::default()
    };
    let raw = match parse_statement(&record.statement) {
        Ok(raw) => raw,
        Err(e) => {
            debug!("{}: {e}", record.article_id);
            report.failed = 1;
            return (None, report);
        }
    };
    for issue in &raw.issues {
        match issue {
            SegmentIssue::DuplicateAuthor { .. } => warn!("{}: {issue}", record.article_id),
            _ => debug!("{}: {issue}", record.article_id),
        }
    }
    report.segments_failed = raw.failed_segments();
    let mut pairs = Vec::with_capacity(raw.pairs.len());
    for p in &raw.pairs {
        match AuthorTaskPair::new(lexicon.normalize(&p.task), p.authors.clone()) {
            Ok(pair) => pairs.push(pair),
            Err(e) => {
                debug!("{}: {e}", record.article_id);
                report.segments_failed += 1;
            }
        }
    }
    report.segments_parsed = pairs.len();
    match ParsedStatement::new(record.article_id.clone(), pairs) {
        Ok(s) => {
            report.parsed = 1;
            (Some(s), report)
        }
        Err(_) => {
            report.failed = 1;
            (None, report)
        }
    }
}

/// Parse every record of a corpus file, in file order.
pub fn parse_corpus(
    corpus: &Path,
    lexicon: &TaskLexicon,
) -> Result<(Vec<ParsedStatement>, ParseReport)> {
    let lines: Vec<(usize, Result<CorpusRecord>)> = read_jsonl(corpus)?.collect();
    let results: Vec<(Option<ParsedStatement>, ParseReport)> = lines
        .into_par_iter()
        .map(|(line, rec)| match rec {
            Ok(rec) => {
                let (s, mut r) = parse_record(&rec, lexicon);
                if s.is_none() {
                    r.failed_lines.push(line);
                }
                (s, r)
            }
            Err(e) => {
                warn!("{e}");
                let r = ParseReport {
                    lines: 1,
                    malformed: 1,
                    malformed_lines: vec![line],
                    ..Default::default()
                };
                (None, r)
            }
        })
        .collect();
    let mut report = ParseReport::default();
    let mut out = Vec::new();
    for (s, r) in results {
        report = report.merge(r);
        out.extend(s);
    }
    Ok((out, report))
}

/// `contribnet parse`: write `parsed.jsonl`.
pub fn run_parse(corpus: &Path, output: &Path, lexicon: &LoadedLexicon) -> Result<ParseReport> {
    let (statements, report) = parse_corpus(corpus, &lexicon.lexicon)?;
    let mut w = JsonlWriter::create(output)?;
    for s in &statements {
        w.write(&ParsedRecord::from_statement(s, &lexicon.fingerprint))?;
    }
    w.finish()?;
    Ok(report)
}
