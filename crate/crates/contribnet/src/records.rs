//! Line-delimited intermediate records and their (de)serialization.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use contribnet_core::graph::{normalized_density, AuthorTaskGraph};
use contribnet_core::metrics::{ArticleSummary, RoleCounts};
use contribnet_core::nullmodel::NullModel;
use contribnet_core::projection::{project, CollaboratorRole};
use contribnet_core::statement::{AuthorTaskPair, ParsedStatement};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One extracted article: output of `ingest`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub article_id: String,
    pub journal: Option<String>,
    pub year: Option<i32>,
    pub statement: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub task: String,
    pub authors: Vec<String>,
}

/// One parsed statement: output of `parse`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedRecord {
    pub article_id: String,
    pub pairs: Vec<PairRecord>,
    pub lexicon_fingerprint: String,
}

impl ParsedRecord {
    pub fn from_statement(s: &ParsedStatement, lexicon_fingerprint: &str) -> Self {
        Self {
            article_id: s.article_id().to_string(),
            pairs: s
                .pairs()
                .iter()
                .map(|p| PairRecord {
                    task: p.task().to_string(),
                    authors: p.authors().to_vec(),
                })
                .collect(),
            lexicon_fingerprint: lexicon_fingerprint.to_string(),
        }
    }

    /// Rebuild the statement, re-checking the pair invariants.
    pub fn to_statement(&self) -> std::result::Result<ParsedStatement, String> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| {
                AuthorTaskPair::new(p.task.clone(), p.authors.clone()).map_err(|e| e.to_string())
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ParsedStatement::new(self.article_id.clone(), pairs).map_err(|e| e.to_string())
    }
}

/// Graph, projection and roles of one article. Null replicates reuse it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub article_id: String,
    pub n_authors: usize,
    pub n_tasks: usize,
    pub k_edges: usize,
    pub density: f64,
    /// `null` for an author without any edge (density null only).
    pub roles: BTreeMap<String, Option<CollaboratorRole>>,
    pub self_weights: BTreeMap<String, u32>,
    /// Keyed `"A|B"` with the two tokens sorted.
    pub pair_weights: BTreeMap<String, u32>,
    pub role_tasks: BTreeMap<CollaboratorRole, BTreeMap<String, u64>>,
    pub lexicon_fingerprint: String,
}

impl GraphRecord {
    pub fn from_graph(g: &AuthorTaskGraph, lexicon_fingerprint: &str) -> Self {
        let net = project(g);
        let roles = net.roles_lenient();
        let summary = ArticleSummary::assemble(g, &roles);
        let authors = g.authors();
        let pair_weights = net
            .pair_weights()
            .iter()
            .map(|(&(i, j), &w)| {
                let (a, b) = (&authors[i], &authors[j]);
                let key = if a <= b {
                    format!("{a}|{b}")
                } else {
                    format!("{b}|{a}")
                };
                (key, w)
            })
            .collect();
        Self {
            article_id: g.article_id().to_string(),
            n_authors: g.n_authors(),
            n_tasks: g.n_tasks(),
            k_edges: g.n_edges(),
            density: normalized_density(g),
            roles: authors.iter().cloned().zip(roles).collect(),
            self_weights: net
                .self_weights()
                .iter()
                .map(|(&i, &w)| (authors[i].clone(), w))
                .collect(),
            pair_weights,
            role_tasks: CollaboratorRole::ALL
                .into_iter()
                .map(|r| (r, summary.role_tasks[r.index()].clone()))
                .collect(),
            lexicon_fingerprint: lexicon_fingerprint.to_string(),
        }
    }

    pub fn summary(&self) -> ArticleSummary {
        let mut role_tasks: [BTreeMap<String, u64>; 3] = Default::default();
        for (role, tasks) in &self.role_tasks {
            role_tasks[role.index()] = tasks.clone();
        }
        ArticleSummary {
            article_id: self.article_id.clone(),
            team_size: self.n_authors,
            n_tasks: self.n_tasks,
            n_edges: self.k_edges,
            density: self.density,
            roles: RoleCounts::from_roles(self.roles.values().flatten()),
            role_tasks,
        }
    }
}

/// One null replicate of one article: output of `nullmodel`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullRecord {
    pub model: NullModel,
    pub replicate: u32,
    pub rejected_attempts: u32,
    #[serde(flatten)]
    pub article: GraphRecord,
}

/// Buffered writer of one JSON object per line.
pub struct JsonlWriter {
    path: PathBuf,
    out: BufWriter<File>,
    count: usize,
}

impl JsonlWriter {
    pub fn create(path: &Path) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
            count: 0,
        })
    }

    pub fn write<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let line = serde_json::to_string(value).expect("records serialize");
        writeln!(self.out, "{line}").map_err(|e| Error::io(&self.path, e))?;
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn finish(mut self) -> Result<usize> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))?;
        Ok(self.count)
    }
}

/// Lines of a JSONL file, each decoded on its own. Blank lines are skipped;
/// the item carries the 1-based line number.
pub fn read_jsonl<T: DeserializeOwned>(
    path: &Path,
) -> Result<impl Iterator<Item = (usize, Result<T>)>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let path = path.to_path_buf();
    Ok(BufReader::new(file)
        .lines()
        .enumerate()
        .filter_map(move |(i, line)| {
            let line_no = i + 1;
            match line {
                Err(e) => Some((line_no, Err(Error::io(&path, e)))),
                Ok(l) if l.trim().is_empty() => None,
                Ok(l) => Some((
                    line_no,
                    serde_json::from_str(&l).map_err(|e| Error::Json {
                        path: path.clone(),
                        line: line_no,
                        message: e.to_string(),
                    }),
                )),
            }
        }))
}

/// Read a whole file, failing on the first bad line.
pub fn read_all<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_jsonl(path)?.map(|(_, r)| r).collect()
}

/// Statements of a `parsed.jsonl` file and the lexicon they were parsed with.
#[derive(Debug, Clone, Default)]
pub struct ParsedCorpus {
    pub statements: Vec<ParsedStatement>,
    /// `None` for an empty file.
    pub lexicon_fingerprint: Option<String>,
}

pub fn load_parsed(path: &Path) -> Result<ParsedCorpus> {
    let mut corpus = ParsedCorpus::default();
    for (line, rec) in read_jsonl::<ParsedRecord>(path)? {
        let rec = rec?;
        match &corpus.lexicon_fingerprint {
            None => corpus.lexicon_fingerprint = Some(rec.lexicon_fingerprint.clone()),
            Some(fp) if *fp != rec.lexicon_fingerprint => {
                return Err(Error::ConfigMismatch {
                    expected: fp.clone(),
                    found: rec.lexicon_fingerprint,
                });
            }
            Some(_) => {}
        }
        let statement = rec.to_statement().map_err(|message| Error::Json {
            path: path.to_path_buf(),
            line,
            message,
        })?;
        corpus.statements.push(statement);
    }
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use contribnet_core::graph::build_graph;
    use contribnet_core::synth::{graph_from_rows, sample_article};

    #[test]
    fn sample_article_record() {
        let rec = GraphRecord::from_graph(&build_graph(&sample_article()), "fp");
        assert_eq!((rec.n_authors, rec.n_tasks, rec.k_edges), (7, 5, 21));
        assert_eq!(rec.density, 0.5);
        assert_eq!(rec.pair_weights["EG|ES"], 3);
        assert_eq!(rec.pair_weights["ES|JD"], 4);
        assert!(rec.self_weights.is_empty());
        assert!(rec
            .roles
            .values()
            .all(|r| *r == Some(CollaboratorRole::TeamPlayer)));
        let s = rec.summary();
        assert_eq!(
            s,
            contribnet_core::metrics::ArticleSummary::from_graph(&build_graph(&sample_article()))
                .unwrap()
        );
    }

    #[test]
    fn null_record_flattens() {
        let g = graph_from_rows("x", &[("t1", "A"), ("t2", "A"), ("t3", "B C")]);
        let rec = NullRecord {
            model: NullModel::Cfm,
            replicate: 3,
            rejected_attempts: 1,
            article: GraphRecord::from_graph(&g, "fp"),
        };
        let json = serde_json::to_value(&rec).unwrap();
        assert_eq!(json["model"], "cfm");
        assert_eq!(json["self_weights"]["A"], 2);
        assert_eq!(json["roles"]["A"], "specialist");
        let back: NullRecord = serde_json::from_value(json).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn corpus_record_has_exact_fields() {
        let rec = CorpusRecord {
            article_id: "a".into(),
            journal: None,
            year: Some(2010),
            statement: "s".into(),
        };
        let json = serde_json::to_value(&rec).unwrap();
        let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["article_id", "journal", "statement", "year"]);
        assert!(serde_json::from_str::<CorpusRecord>(
            r#"{"article_id":"a","journal":null,"year":null,"statement":"s","x":1}"#
        )
        .is_err());
    }
}
