//! Debug edge lists: `A<TAB>author`, `T<TAB>task`, `E<TAB>author<TAB>task`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use contribnet_core::graph::AuthorTaskGraph;

use crate::error::{Error, Result};

pub fn edge_list(g: &AuthorTaskGraph) -> String {
    let mut s = String::new();
    for a in g.authors() {
        let _ = writeln!(s, "A\t{a}");
    }
    for t in g.tasks() {
        let _ = writeln!(s, "T\t{t}");
    }
    for (a, t) in g.edges() {
        let _ = writeln!(s, "E\t{a}\t{t}");
    }
    s
}

/// Article ids are DOIs; keep them readable but filesystem safe.
pub fn file_name(article_id: &str) -> String {
    format!("{}.tsv", sanitize(article_id))
}

fn sanitize(article_id: &str) -> String {
    let mut name: String = article_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if name.is_empty() || name.starts_with('.') {
        name.insert(0, '_');
    }
    name
}

pub fn dump_all(dir: &Path, graphs: &[AuthorTaskGraph]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::with_capacity(graphs.len());
    for g in graphs {
        let mut path = dir.join(file_name(g.article_id()));
        // two ids can sanitize to the same name
        let mut n = 1;
        while out.contains(&path) {
            n += 1;
            path = dir.join(format!("{}-{n}.tsv", sanitize(g.article_id())));
        }
        fs::write(&path, edge_list(g)).map_err(|e| Error::io(&path, e))?;
        out.push(path);
    }
    Ok(out)
}
