//! Co-contributorship networks and collaborator roles.
//!
//! The projection differs from the usual one-mode projection in one way:
//! a task with a single performer adds a self-loop to that author instead
//! of vanishing. Edge weights count tasks, so a task shared by five authors
//! adds exactly one to each of the ten pair weights.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::AuthorTaskGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CollaboratorRole {
    /// Only self-loops: every task done alone.
    Specialist,
    /// Both self-loops and pair edges.
    Versatile,
    /// No self-loops: every task shared.
    TeamPlayer,
}

impl CollaboratorRole {
    pub const ALL: [CollaboratorRole; 3] = [
        CollaboratorRole::Specialist,
        CollaboratorRole::Versatile,
        CollaboratorRole::TeamPlayer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CollaboratorRole::Specialist => "specialist",
            CollaboratorRole::Versatile => "versatile",
            CollaboratorRole::TeamPlayer => "team_player",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.as_str() == name)
    }

    fn from_loops(has_self: bool, has_pair: bool) -> Option<Self> {
        match (has_self, has_pair) {
            (true, false) => Some(CollaboratorRole::Specialist),
            (true, true) => Some(CollaboratorRole::Versatile),
            (false, true) => Some(CollaboratorRole::TeamPlayer),
            (false, false) => None,
        }
    }
}

impl fmt::Display for CollaboratorRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An author with neither self nor pair weight; only isolated nodes do this.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyError {
    pub article_id: String,
    pub author: String,
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "article {}: author {:?} has no incident weight",
            self.article_id, self.author
        )
    }
}

impl core::error::Error for ClassifyError {}

/// Weighted undirected projection onto authors, self-loops kept apart.
///
/// Pair keys are `(i, j)` author indices with `i < j`; only nonzero weights
/// are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoContribNetwork {
    article_id: String,
    authors: Vec<String>,
    pair_weights: BTreeMap<(usize, usize), u32>,
    self_weights: BTreeMap<usize, u32>,
}

impl CoContribNetwork {
    pub fn article_id(&self) -> &str {
        &self.article_id
    }

    pub fn authors(&self) -> &[String] {
        &self.authors
    }

    pub fn pair_weights(&self) -> &BTreeMap<(usize, usize), u32> {
        &self.pair_weights
    }

    pub fn self_weights(&self) -> &BTreeMap<usize, u32> {
        &self.self_weights
    }

    fn index_of(&self, token: &str) -> Option<usize> {
        self.authors.iter().position(|a| a == token)
    }

    /// Tasks co-performed by two authors, by token; 0 for unknown tokens.
    pub fn pair_weight(&self, a: &str, b: &str) -> u32 {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) if i != j => self
                .pair_weights
                .get(&(i.min(j), i.max(j)))
                .copied()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Tasks an author performed alone.
    pub fn self_weight(&self, token: &str) -> u32 {
        self.index_of(token)
            .and_then(|i| self.self_weights.get(&i).copied())
            .unwrap_or(0)
    }

    /// Role of author `index`, or `None` when it carries no weight at all.
    pub fn role_of(&self, index: usize) -> Option<CollaboratorRole> {
        let has_self = self.self_weights.contains_key(&index);
        let has_pair = self
            .pair_weights
            .keys()
            .any(|&(i, j)| i == index || j == index);
        CollaboratorRole::from_loops(has_self, has_pair)
    }

    /// Roles for every author; weightless authors map to `None`.
    pub fn roles_lenient(&self) -> Vec<Option<CollaboratorRole>> {
        let mut has_self = alloc::vec![false; self.authors.len()];
        let mut has_pair = alloc::vec![false; self.authors.len()];
        for &i in self.self_weights.keys() {
            has_self[i] = true;
        }
        for &(i, j) in self.pair_weights.keys() {
            has_pair[i] = true;
            has_pair[j] = true;
        }
        has_self
            .into_iter()
            .zip(has_pair)
            .map(|(s, p)| CollaboratorRole::from_loops(s, p))
            .collect()
    }

    pub fn total_pair_weight(&self) -> u64 {
        self.pair_weights.values().map(|&w| u64::from(w)).sum()
    }

    pub fn total_self_weight(&self) -> u64 {
        self.self_weights.values().map(|&w| u64::from(w)).sum()
    }
}

/// Project an author-task graph onto its authors.
pub fn project(g: &AuthorTaskGraph) -> CoContribNetwork {
    let mut pair_weights = BTreeMap::new();
    let mut self_weights = BTreeMap::new();
    for performers in g.performers() {
        match performers.as_slice() {
            [] => {}
            [solo] => *self_weights.entry(*solo).or_insert(0) += 1,
            many => {
                for (x, &i) in many.iter().enumerate() {
                    for &j in &many[x + 1..] {
                        *pair_weights.entry((i, j)).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    CoContribNetwork {
        article_id: g.article_id().into(),
        authors: g.authors().to_vec(),
        pair_weights,
        self_weights,
    }
}

/// Classify every author of `net`, aligned with `net.authors()`.
pub fn classify(net: &CoContribNetwork) -> Result<Vec<CollaboratorRole>, ClassifyError> {
    net.roles_lenient()
        .into_iter()
        .enumerate()
        .map(|(i, role)| {
            role.ok_or_else(|| ClassifyError {
                article_id: net.article_id.clone(),
                author: net.authors[i].clone(),
            })
        })
        .collect()
}
