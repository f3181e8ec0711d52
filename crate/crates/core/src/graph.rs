//! Per-article author-task bipartite graphs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::statement::ParsedStatement;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    NoAuthors,
    NoTasks,
    IndexOutOfRange { author: usize, task: usize },
    IsolatedAuthor { index: usize },
    IsolatedTask { index: usize },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::NoAuthors => f.write_str("graph has no author nodes"),
            GraphError::NoTasks => f.write_str("graph has no task nodes"),
            GraphError::IndexOutOfRange { author, task } => {
                write!(f, "edge ({author}, {task}) references a missing node")
            }
            GraphError::IsolatedAuthor { index } => write!(f, "author {index} has no edges"),
            GraphError::IsolatedTask { index } => write!(f, "task {index} has no edges"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Unweighted bipartite graph between the authors and tasks of one article.
///
/// Edges are stored sorted and deduplicated as `(author_index, task_index)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorTaskGraph {
    article_id: String,
    authors: Vec<String>,
    tasks: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl AuthorTaskGraph {
    /// Build a graph in which every node has at least one edge.
    pub fn new(
        article_id: impl Into<String>,
        authors: Vec<String>,
        tasks: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let g = Self::with_isolated(article_id, authors, tasks, edges)?;
        let (ad, td) = g.degrees();
        if let Some(index) = ad.iter().position(|&d| d == 0) {
            return Err(GraphError::IsolatedAuthor { index });
        }
        if let Some(index) = td.iter().position(|&d| d == 0) {
            return Err(GraphError::IsolatedTask { index });
        }
        Ok(g)
    }

    /// Build a graph that may contain degree-zero nodes (the density null).
    pub fn with_isolated(
        article_id: impl Into<String>,
        authors: Vec<String>,
        tasks: Vec<String>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        if authors.is_empty() {
            return Err(GraphError::NoAuthors);
        }
        if tasks.is_empty() {
            return Err(GraphError::NoTasks);
        }
        let mut set = BTreeSet::new();
        for (a, t) in edges {
            if a >= authors.len() || t >= tasks.len() {
                return Err(GraphError::IndexOutOfRange { author: a, task: t });
            }
            set.insert((a, t));
        }
        Ok(Self {
            article_id: article_id.into(),
            authors,
            tasks,
            edges: set.into_iter().collect(),
        })
    }

    pub fn article_id(&self) -> &str {
        &self.article_id
    }

    pub fn authors(&self) -> &[String] {
        &self.authors
    }

    pub fn tasks(&self) -> &[String] {
        &self.tasks
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn n_authors(&self) -> usize {
        self.authors.len()
    }

    pub fn n_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, author: usize, task: usize) -> bool {
        self.edges.binary_search(&(author, task)).is_ok()
    }

    /// `(author degrees, task degrees)` indexed like the node lists.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let mut ad = alloc::vec![0; self.authors.len()];
        let mut td = alloc::vec![0; self.tasks.len()];
        for &(a, t) in &self.edges {
            ad[a] += 1;
            td[t] += 1;
        }
        (ad, td)
    }

    /// Author indices performing each task, in author order.
    pub fn performers(&self) -> Vec<Vec<usize>> {
        let mut per_task = alloc::vec![Vec::new(); self.tasks.len()];
        for &(a, t) in &self.edges {
            per_task[t].push(a);
        }
        for list in &mut per_task {
            list.sort_unstable();
        }
        per_task
    }

    pub fn has_isolated_nodes(&self) -> bool {
        let (ad, td) = self.degrees();
        ad.contains(&0) || td.contains(&0)
    }

    /// Same nodes, different edge set.
    pub fn rewired(
        &self,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        Self::new(
            self.article_id.clone(),
            self.authors.clone(),
            self.tasks.clone(),
            edges,
        )
    }
}

/// One node per distinct canonical task and per distinct author token;
/// an edge wherever a token appears in a task's row.
pub fn build_graph(parsed: &ParsedStatement) -> AuthorTaskGraph {
    let mut authors: Vec<String> = Vec::new();
    let mut tasks: Vec<String> = Vec::new();
    let mut author_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut task_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for pair in parsed.pairs() {
        let t = *task_index.entry(pair.task()).or_insert_with(|| {
            tasks.push(pair.task().into());
            tasks.len() - 1
        });
        for author in pair.authors() {
            let a = *author_index.entry(author.as_str()).or_insert_with(|| {
                authors.push(author.clone());
                authors.len() - 1
            });
            edges.push((a, t));
        }
    }
    AuthorTaskGraph::new(parsed.article_id(), authors, tasks, edges)
        .expect("every parsed row names a task and at least one author")
}

/// Edge count rescaled between the minimally connected graph (0) and the
/// complete bipartite graph (1). Single-author or single-task graphs are 1.
///
/// Graphs with isolated nodes can fall below zero; only the density null
/// produces those.
pub fn normalized_density(g: &AuthorTaskGraph) -> f64 {
    density_from_counts(g.n_authors(), g.n_tasks(), g.n_edges())
}

pub fn density_from_counts(n_authors: usize, n_tasks: usize, n_edges: usize) -> f64 {
    if n_authors == 1 || n_tasks == 1 {
        return 1.0;
    }
    let floor = n_authors.max(n_tasks) as f64;
    (n_edges as f64 - floor) / ((n_authors * n_tasks) as f64 - floor)
}
