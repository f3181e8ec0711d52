mod common;

use std::fs;

use common::{fixture, SAMPLE_STATEMENT};
use contribnet::ingest::{build_corpus, extract_document, extract_statement, IngestOptions};
use contribnet::records::{read_all, CorpusRecord};
use contribnet::Error;

#[test]
fn sample_fragment() {
    let text = fs::read_to_string(fixture("sample_article.xml")).unwrap();
    let doc = extract_document(&text).unwrap();
    assert_eq!(doc.statement.as_deref(), Some(SAMPLE_STATEMENT));
    assert_eq!(
        doc.article_id.as_deref(),
        Some("10.1371/journal.pone.0000001")
    );
    assert_eq!(doc.journal.as_deref(), Some("PLoS ONE"));
    assert_eq!(doc.year, Some(2006));
}

#[test]
fn first_of_two_footnotes() {
    let text = fs::read_to_string(fixture("two_footnotes.xml")).unwrap();
    assert_eq!(
        extract_statement(&text).unwrap().as_deref(),
        Some("Wrote the paper: AB CD.")
    );
}

#[test]
fn absent_statement() {
    let text = fs::read_to_string(fixture("no_statement.xml")).unwrap();
    assert_eq!(extract_statement(&text).unwrap(), None);
}

#[test]
fn malformed_file_is_an_error_with_offset() {
    let text = fs::read_to_string(fixture("malformed.xml")).unwrap();
    match extract_statement(&text) {
        Err(Error::Xml { offset, .. }) => assert!(offset > 0 && (offset as usize) <= text.len()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn corpus_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus.jsonl");
    let inputs = [
        fixture("sample_article.xml"),
        fixture("two_footnotes.xml"),
        fixture("no_statement.xml"),
    ];
    let s = build_corpus(&inputs, &out, IngestOptions::default()).unwrap();
    assert_eq!((s.total, s.extracted, s.skipped), (3, 2, 1));

    let records: Vec<CorpusRecord> = read_all(&out).unwrap();
    assert_eq!(records.len(), 2);
    assert_eq!(records[0].statement, SAMPLE_STATEMENT);
    assert_eq!(records[0].journal.as_deref(), Some("PLoS ONE"));
    assert_eq!(records[1].article_id, "10.1371/journal.pone.0000002");
    assert_eq!(records[1].year, None);
}

#[test]
fn empty_input_list() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus.jsonl");
    let s = build_corpus(&[], &out, IngestOptions::default()).unwrap();
    assert_eq!((s.total, s.extracted, s.skipped), (0, 0, 0));
    assert_eq!(fs::read(&out).unwrap(), b"");
}

#[test]
fn duplicate_id_keeps_first() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus.jsonl");
    let inputs = [
        fixture("sample_article.xml"),
        fixture("duplicate_of_sample.xml"),
    ];
    let s = build_corpus(&inputs, &out, IngestOptions::default()).unwrap();
    assert_eq!((s.total, s.extracted, s.skipped), (2, 1, 1));
    assert_eq!(s.duplicates, ["10.1371/journal.pone.0000001"]);
    let records: Vec<CorpusRecord> = read_all(&out).unwrap();
    assert_eq!(records[0].statement, SAMPLE_STATEMENT);
}

#[test]
fn unreadable_and_malformed_files_do_not_stop_the_batch() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus.jsonl");
    let inputs = [
        dir.path().join("missing.xml"),
        fixture("malformed.xml"),
        fixture("sample_article.xml"),
    ];
    let s = build_corpus(&inputs, &out, IngestOptions::default()).unwrap();
    assert_eq!((s.total, s.extracted, s.skipped), (3, 1, 2));
    assert_eq!(s.errors.len(), 2);
    assert!(
        s.errors[1].message.contains("byte"),
        "{}",
        s.errors[1].message
    );
}

#[test]
fn acknowledgments_only_with_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus.jsonl");
    let inputs = [fixture("ack_only.xml")];
    let s = build_corpus(&inputs, &out, IngestOptions::default()).unwrap();
    assert_eq!(s.extracted, 0);

    let s = build_corpus(&inputs, &out, IngestOptions { ack_fallback: true }).unwrap();
    assert_eq!(s.extracted, 1);
    let records: Vec<CorpusRecord> = read_all(&out).unwrap();
    assert_eq!(
        records[0].statement,
        "Conceived the study: AB. Performed the experiments: AB CD."
    );
    assert_eq!(records[0].year, Some(2009));
}

#[test]
fn directories_expand_in_sorted_order() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("xml");
    fs::create_dir_all(src.join("nested")).unwrap();
    fs::copy(fixture("two_footnotes.xml"), src.join("b.xml")).unwrap();
    fs::copy(fixture("sample_article.xml"), src.join("nested/a.nxml")).unwrap();
    fs::write(src.join("notes.txt"), "ignored").unwrap();
    let out = dir.path().join("corpus.jsonl");
    let s = build_corpus(&[src], &out, IngestOptions::default()).unwrap();
    assert_eq!((s.total, s.extracted), (2, 2));
    let records: Vec<CorpusRecord> = read_all(&out).unwrap();
    assert_eq!(records[0].article_id, "10.1371/journal.pone.0000002");
}

#[test]
fn invalid_utf8_is_replaced() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("latin1.xml");
    let mut bytes = b"<article><article-id pub-id-type=\"doi\">x</article-id><fn fn-type=\"con\"><p>Wrote the paper: J".to_vec();
    bytes.push(0xE9);
    bytes.extend_from_slice(b"R.</p></fn></article>");
    fs::write(&path, bytes).unwrap();
    let out = dir.path().join("corpus.jsonl");
    let s = build_corpus(&[path], &out, IngestOptions::default()).unwrap();
    assert_eq!(s.extracted, 1);
    let records: Vec<CorpusRecord> = read_all(&out).unwrap();
    assert_eq!(records[0].statement, "Wrote the paper: J\u{FFFD}R.");
}

#[test]
fn records_round_trip_through_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus.jsonl");
    let inputs = [fixture("sample_article.xml"), fixture("two_footnotes.xml")];
    build_corpus(&inputs, &out, IngestOptions::default()).unwrap();
    let first: Vec<CorpusRecord> = read_all(&out).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    let rewritten: String = first
        .iter()
        .map(|r| serde_json::to_string(r).unwrap() + "\n")
        .collect();
    assert_eq!(text, rewritten);
    assert!(!text.contains('\r'));
}
