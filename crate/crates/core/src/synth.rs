//! Synthetic statements with a controlled division of labor.
//!
//! Used as fixtures by the test suites and the `demo` corpus. Three regimes:
//! every task done by exactly one author, every task done by everyone, and
//! a mixed regime in which each article has a specialist, a versatile and
//! at least one team-player.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::graph::{build_graph, AuthorTaskGraph};
use crate::nullmodel::stream_rng;
use crate::statement::{AuthorTaskPair, ParsedStatement};

/// Canonical task labels used to name synthetic tasks, common five first.
pub const TASK_VOCABULARY: &[&str] = &[
    "conceived and designed the experiments",
    "performed the experiments",
    "analyzed the data",
    "contributed reagents/materials/analysis tools",
    "wrote the paper",
    "supervised the research",
    "obtained funding",
    "collected the samples",
    "revised the paper",
    "interpreted the data",
    "designed the software",
    "provided technical support",
    "approved the final version",
    "collected the data",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Each task has exactly one performer.
    AllSolo,
    /// Every author performs every task.
    AllShared,
    /// One specialist, one versatile, the rest team-players.
    Mixed,
}

/// The statement of the sample article, normalized.
pub fn sample_article() -> ParsedStatement {
    let rows = [
        ("conceived and designed the experiments", "EG ES JD"),
        ("performed the experiments", "ES JD MH JP MS"),
        ("analyzed the data", "EG ES FC JD JP MS"),
        (
            "contributed reagents/materials/analysis tools",
            "ES JD MH JP MS",
        ),
        ("wrote the paper", "EG ES"),
    ];
    statement_from_rows("sample", &rows)
}

/// `rows` are `(task, space-separated authors)`.
pub fn statement_from_rows(article_id: &str, rows: &[(&str, &str)]) -> ParsedStatement {
    let pairs = rows
        .iter()
        .map(|(task, authors)| {
            AuthorTaskPair::new(
                *task,
                authors.split_whitespace().map(String::from).collect(),
            )
            .expect("fixture rows are well formed")
        })
        .collect();
    ParsedStatement::new(article_id, pairs).expect("fixture has rows")
}

pub fn graph_from_rows(article_id: &str, rows: &[(&str, &str)]) -> AuthorTaskGraph {
    build_graph(&statement_from_rows(article_id, rows))
}

/// Two-letter initials `AA`, `AB`, ... for author `i`.
pub fn initials(i: usize) -> String {
    let hi = (b'A' + (i / 26 % 26) as u8) as char;
    let lo = (b'A' + (i % 26) as u8) as char;
    let mut s = String::with_capacity(2);
    s.push(hi);
    s.push(lo);
    s
}

fn task_label(i: usize) -> String {
    TASK_VOCABULARY
        .get(i)
        .map_or_else(|| format!("performed task {i}"), |s| s.to_string())
}

/// Random graph on `na` authors and `nt` tasks with no isolated node.
pub fn random_connected_graph(na: usize, nt: usize, seed: u64) -> AuthorTaskGraph {
    let mut rng = stream_rng(seed, 0, "random-graph");
    let mut edges = Vec::new();
    for a in 0..na {
        for t in 0..nt {
            if rng.random_bool(0.4) {
                edges.push((a, t));
            }
        }
    }
    for a in 0..na {
        edges.push((a, rng.random_range(0..nt)));
    }
    for t in 0..nt {
        edges.push((rng.random_range(0..na), t));
    }
    let authors = (0..na).map(initials).collect();
    let tasks = (0..nt).map(task_label).collect();
    AuthorTaskGraph::new("random", authors, tasks, edges).expect("every node covered")
}

fn assemble(article_id: String, tasks: Vec<(String, Vec<usize>)>) -> ParsedStatement {
    let pairs = tasks
        .into_iter()
        .filter(|(_, who)| !who.is_empty())
        .map(|(task, mut who)| {
            who.sort_unstable();
            who.dedup();
            AuthorTaskPair::new(task, who.into_iter().map(initials).collect()).expect("non-empty")
        })
        .collect();
    ParsedStatement::new(article_id, pairs).expect("at least one task")
}

/// One synthetic article of `team_size` authors in `regime`.
pub fn synthetic_statement<R: Rng + ?Sized>(
    article_id: String,
    regime: Regime,
    team_size: usize,
    rng: &mut R,
) -> ParsedStatement {
    assert!(team_size >= 1);
    match regime {
        Regime::AllSolo => {
            let n_tasks = team_size + rng.random_range(0..3);
            let mut owners: Vec<usize> = (0..team_size).collect();
            owners.extend((team_size..n_tasks).map(|_| rng.random_range(0..team_size)));
            owners.shuffle(rng);
            let tasks = owners
                .into_iter()
                .enumerate()
                .map(|(t, a)| (task_label(t), alloc::vec![a]))
                .collect();
            assemble(article_id, tasks)
        }
        Regime::AllShared => {
            let n_tasks = rng.random_range(3..=6);
            let tasks = (0..n_tasks)
                .map(|t| (task_label(t), (0..team_size).collect()))
                .collect();
            assemble(article_id, tasks)
        }
        Regime::Mixed => {
            assert!(team_size >= 3, "mixed regime needs three authors");
            // author 0: specialist on tools; author 1: supervises alone and co-writes
            let mut tasks: Vec<(String, Vec<usize>)> = alloc::vec![
                (task_label(3), alloc::vec![0]),
                (task_label(5), alloc::vec![1]),
                (task_label(4), alloc::vec![1, 2]),
            ];
            // Fixed-size crews: only who does what varies, not how many.
            let crew: Vec<usize> = (2..team_size).collect();
            let mut performed = crew.clone();
            if performed.len() < 2 {
                performed.push(1);
            }
            tasks.push((task_label(1), performed));
            let pool: Vec<usize> = (1..team_size).collect();
            let size = (pool.len() / 2).max(2);
            for t in [0usize, 2] {
                let who = pool.choose_multiple(rng, size).copied().collect();
                tasks.push((task_label(t), who));
            }
            assemble(article_id, tasks)
        }
    }
}

/// `n` articles of one regime and team size.
pub fn regime_corpus(
    regime: Regime,
    team_size: usize,
    n: usize,
    seed: u64,
) -> Vec<ParsedStatement> {
    (0..n)
        .map(|i| {
            let id = format!("{regime:?}-{team_size}-{i}").to_lowercase();
            let mut rng = stream_rng(seed, i as u64, &id);
            synthetic_statement(id, regime, team_size, &mut rng)
        })
        .collect()
}

pub fn mixed_corpus(team_size: usize, n: usize, seed: u64) -> Vec<ParsedStatement> {
    regime_corpus(Regime::Mixed, team_size, n, seed)
}

/// Articles with random team sizes in `[min_team, max_team]` and random
/// performer subsets, so every role occurs somewhere.
pub fn random_corpus(
    n: usize,
    min_team: usize,
    max_team: usize,
    seed: u64,
) -> Vec<ParsedStatement> {
    (0..n)
        .map(|i| {
            let id = format!("random-{i}");
            let mut rng = stream_rng(seed, i as u64, &id);
            let k = rng.random_range(min_team..=max_team);
            let n_tasks = rng.random_range(1..=8);
            let mut tasks: Vec<(String, Vec<usize>)> = (0..n_tasks)
                .map(|t| {
                    let share = rng.random_range(0.05..0.9);
                    let who: Vec<usize> = (0..k).filter(|_| rng.random_bool(share)).collect();
                    (task_label(t), who)
                })
                .collect();
            // authors with no task join a random one
            for a in 0..k {
                if !tasks.iter().any(|(_, who)| who.contains(&a)) {
                    let t = rng.random_range(0..n_tasks);
                    tasks[t].1.push(a);
                }
            }
            assemble(id, tasks)
        })
        .collect()
}

/// Render a statement back into `Task: TOKENS.` text.
pub fn render_statement(statement: &ParsedStatement) -> String {
    let mut out = String::new();
    for pair in statement.pairs() {
        if !out.is_empty() {
            out.push(' ');
        }
        let mut chars = pair.task().chars();
        if let Some(first) = chars.next() {
            out.extend(first.to_uppercase());
            out.push_str(chars.as_str());
        }
        out.push(':');
        for a in pair.authors() {
            out.push(' ');
            out.push_str(a);
        }
        out.push('.');
    }
    out
}
