//! Random author-task graphs for comparison against observed articles.
//!
//! Three ensembles are provided:
//!
//! - [`NullModel::Cfm`]: both degree sequences fixed, stubs matched uniformly
//!   and the whole matching rejected whenever it produces a multi-edge.
//! - [`NullModel::Erm`]: edge count fixed; distinct cells drawn uniformly and
//!   the draw rejected if any node is left without an edge.
//! - [`NullModel::ErDensity`]: every author-task cell is an edge
//!   independently with the cohort-calibrated probability from
//!   [`er_density_probability`]; isolated nodes are kept.
//!
//! Labels are carried over positionally from the template article so the
//! samples go through the same projection and classification code.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{AuthorTaskGraph, GraphError};

pub const DEFAULT_MAX_ATTEMPTS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum NullModel {
    #[cfg_attr(feature = "serde", serde(rename = "cfm"))]
    Cfm,
    #[cfg_attr(feature = "serde", serde(rename = "erm"))]
    Erm,
    #[cfg_attr(feature = "serde", serde(rename = "erd"))]
    ErDensity,
}

impl NullModel {
    pub const ALL: [NullModel; 3] = [NullModel::Cfm, NullModel::Erm, NullModel::ErDensity];

    pub fn as_str(self) -> &'static str {
        match self {
            NullModel::Cfm => "cfm",
            NullModel::Erm => "erm",
            NullModel::ErDensity => "erd",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == name)
    }

    /// Draw one replicate shaped like `template`.
    ///
    /// The density null needs the template's cohort profile; the other two
    /// ignore it.
    pub fn sample<R: Rng + ?Sized>(
        self,
        template: &AuthorTaskGraph,
        profile: Option<&CohortProfile>,
        rng: &mut R,
        max_attempts: u32,
    ) -> Result<Sample, NullModelError> {
        match self {
            NullModel::Cfm => sample_cfm(template, rng, max_attempts),
            NullModel::Erm => sample_erm_like(template, rng, max_attempts),
            NullModel::ErDensity => {
                let profile = profile.ok_or(NullModelError::MissingProfile)?;
                Ok(Sample {
                    graph: sample_er_density(profile, template, rng),
                    rejected_attempts: 0,
                })
            }
        }
    }
}

impl fmt::Display for NullModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NullModelError {
    /// Every attempt hit a multi-edge (CFM) or an isolated node (ERM).
    SamplingExhausted {
        attempts: u32,
    },
    /// No simple graph without isolated nodes has this many edges.
    InfeasibleEdgeCount {
        n_authors: usize,
        n_tasks: usize,
        n_edges: usize,
    },
    /// Author and task degree sums differ.
    DegreeSumMismatch {
        authors: usize,
        tasks: usize,
    },
    MissingProfile,
    InvalidConfig(&'static str),
    InvalidProfile {
        team_size: usize,
    },
    Graph(GraphError),
}

impl fmt::Display for NullModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullModelError::SamplingExhausted { attempts } => {
                write!(f, "no acceptable sample after {attempts} attempts")
            }
            NullModelError::InfeasibleEdgeCount { n_authors, n_tasks, n_edges } => write!(
                f,
                "{n_edges} edges cannot cover {n_authors} authors and {n_tasks} tasks without isolated nodes"
            ),
            NullModelError::DegreeSumMismatch { authors, tasks } => {
                write!(f, "author degree sum {authors} differs from task degree sum {tasks}")
            }
            NullModelError::MissingProfile => f.write_str("density null needs a cohort profile"),
            NullModelError::InvalidConfig(what) => write!(f, "invalid null model config: {what}"),
            NullModelError::InvalidProfile { team_size } => {
                write!(f, "invalid cohort profile for team size {team_size}")
            }
            NullModelError::Graph(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for NullModelError {}

impl From<GraphError> for NullModelError {
    fn from(e: GraphError) -> Self {
        NullModelError::Graph(e)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NullModelConfig {
    pub model: NullModel,
    pub replicates: u32,
    pub seed: u64,
    pub max_attempts: u32,
}

impl NullModelConfig {
    pub fn new(
        model: NullModel,
        replicates: u32,
        seed: u64,
        max_attempts: u32,
    ) -> Result<Self, NullModelError> {
        if replicates == 0 {
            return Err(NullModelError::InvalidConfig(
                "replicates must be at least 1",
            ));
        }
        if max_attempts == 0 {
            return Err(NullModelError::InvalidConfig(
                "max_attempts must be at least 1",
            ));
        }
        Ok(Self {
            model,
            replicates,
            seed,
            max_attempts,
        })
    }

    /// RNG for one `(replicate, article)` cell of a run.
    pub fn rng_for(&self, replicate: u32, article_id: &str) -> ChaCha8Rng {
        stream_rng(self.seed, u64::from(replicate), article_id)
    }
}

/// Mean task-node count over all articles with `team_size` authors.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CohortProfile {
    team_size: usize,
    mean_tasks: f64,
}

impl CohortProfile {
    pub fn new(team_size: usize, mean_tasks: f64) -> Result<Self, NullModelError> {
        if team_size < 2 || !(mean_tasks.is_finite() && mean_tasks > 0.0) {
            return Err(NullModelError::InvalidProfile { team_size });
        }
        Ok(Self {
            team_size,
            mean_tasks,
        })
    }

    pub fn team_size(&self) -> usize {
        self.team_size
    }

    pub fn mean_tasks(&self) -> f64 {
        self.mean_tasks
    }

    /// Task-node count of the density null: the mean rounded half-up.
    pub fn task_nodes(&self) -> usize {
        (libm::floor(self.mean_tasks + 0.5) as usize).max(1)
    }

    /// One profile per team size (≥ 2) present in `graphs`, ascending.
    pub fn from_graphs<'a, I>(graphs: I) -> Vec<CohortProfile>
    where
        I: IntoIterator<Item = &'a AuthorTaskGraph>,
    {
        let mut sums: alloc::collections::BTreeMap<usize, (usize, usize)> = Default::default();
        for g in graphs {
            let e = sums.entry(g.n_authors()).or_insert((0, 0));
            e.0 += g.n_tasks();
            e.1 += 1;
        }
        sums.into_iter()
            .filter(|&(k, _)| k >= 2)
            .map(|(k, (tasks, n))| CohortProfile {
                team_size: k,
                mean_tasks: tasks as f64 / n as f64,
            })
            .collect()
    }
}

/// One accepted replicate plus the number of rejected attempts before it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub graph: AuthorTaskGraph,
    pub rejected_attempts: u32,
}

/// Degree-preserving sample by uniform stub matching with whole-sample rejection.
pub fn sample_cfm<R: Rng + ?Sized>(
    g: &AuthorTaskGraph,
    rng: &mut R,
    max_attempts: u32,
) -> Result<Sample, NullModelError> {
    let (author_deg, task_deg) = g.degrees();
    let author_sum: usize = author_deg.iter().sum();
    let task_sum: usize = task_deg.iter().sum();
    if author_sum != task_sum {
        return Err(NullModelError::DegreeSumMismatch {
            authors: author_sum,
            tasks: task_sum,
        });
    }
    let author_stubs: Vec<usize> = author_deg
        .iter()
        .enumerate()
        .flat_map(|(a, &d)| core::iter::repeat_n(a, d))
        .collect();
    let mut task_stubs: Vec<usize> = task_deg
        .iter()
        .enumerate()
        .flat_map(|(t, &d)| core::iter::repeat_n(t, d))
        .collect();

    let n_tasks = g.n_tasks();
    let mut occupied = alloc::vec![false; g.n_authors() * n_tasks];
    for attempt in 0..max_attempts {
        task_stubs.shuffle(rng);
        occupied.iter_mut().for_each(|c| *c = false);
        let simple = author_stubs.iter().zip(&task_stubs).all(|(&a, &t)| {
            let cell = &mut occupied[a * n_tasks + t];
            !core::mem::replace(cell, true)
        });
        if simple {
            let graph = g.rewired(author_stubs.iter().copied().zip(task_stubs.iter().copied()))?;
            return Ok(Sample {
                graph,
                rejected_attempts: attempt,
            });
        }
    }
    Err(NullModelError::SamplingExhausted {
        attempts: max_attempts,
    })
}

/// Edge sets of `n_edges` distinct cells covering every node, uniformly.
///
/// Returns sorted `(author, task)` edges and the number of rejected draws.
pub fn sample_erm_edges<R: Rng + ?Sized>(
    n_authors: usize,
    n_tasks: usize,
    n_edges: usize,
    rng: &mut R,
    max_attempts: u32,
) -> Result<(Vec<(usize, usize)>, u32), NullModelError> {
    let cells = n_authors * n_tasks;
    if n_authors == 0 || n_tasks == 0 || n_edges < n_authors.max(n_tasks) || n_edges > cells {
        return Err(NullModelError::InfeasibleEdgeCount {
            n_authors,
            n_tasks,
            n_edges,
        });
    }
    let mut author_hit = alloc::vec![false; n_authors];
    let mut task_hit = alloc::vec![false; n_tasks];
    for attempt in 0..max_attempts {
        author_hit.iter_mut().for_each(|h| *h = false);
        task_hit.iter_mut().for_each(|h| *h = false);
        let picked = rand::seq::index::sample(rng, cells, n_edges);
        for cell in picked.iter() {
            author_hit[cell / n_tasks] = true;
            task_hit[cell % n_tasks] = true;
        }
        if author_hit.iter().all(|&h| h) && task_hit.iter().all(|&h| h) {
            let mut edges: Vec<(usize, usize)> =
                picked.iter().map(|c| (c / n_tasks, c % n_tasks)).collect();
            edges.sort_unstable();
            return Ok((edges, attempt));
        }
    }
    Err(NullModelError::SamplingExhausted {
        attempts: max_attempts,
    })
}

/// Edge-count-preserving sample on anonymous nodes `a0..`, `t0..`.
pub fn sample_erm<R: Rng + ?Sized>(
    n_authors: usize,
    n_tasks: usize,
    n_edges: usize,
    rng: &mut R,
    max_attempts: u32,
) -> Result<Sample, NullModelError> {
    let (edges, rejected) = sample_erm_edges(n_authors, n_tasks, n_edges, rng, max_attempts)?;
    let authors = (0..n_authors).map(|i| format!("a{i}")).collect();
    let tasks = (0..n_tasks).map(|i| format!("t{i}")).collect();
    let graph = AuthorTaskGraph::new("erm", authors, tasks, edges)?;
    Ok(Sample {
        graph,
        rejected_attempts: rejected,
    })
}

/// Edge-count-preserving sample keeping the template's node labels.
pub fn sample_erm_like<R: Rng + ?Sized>(
    g: &AuthorTaskGraph,
    rng: &mut R,
    max_attempts: u32,
) -> Result<Sample, NullModelError> {
    let (edges, rejected) =
        sample_erm_edges(g.n_authors(), g.n_tasks(), g.n_edges(), rng, max_attempts)?;
    Ok(Sample {
        graph: g.rewired(edges)?,
        rejected_attempts: rejected,
    })
}

/// Probability that an author performs a given task in an article:
/// tasks per author in the article over the cohort's mean task count,
/// capped at 1.
pub fn er_density_probability(profile: &CohortProfile, n_edges: usize, n_authors: usize) -> f64 {
    let per_author = n_edges as f64 / n_authors as f64;
    (per_author / profile.mean_tasks).min(1.0)
}

/// Independent-cell bipartite graph on the template's authors and the
/// cohort's rounded mean number of tasks. Isolated nodes are allowed.
pub fn sample_er_density<R: Rng + ?Sized>(
    profile: &CohortProfile,
    article_ref: &AuthorTaskGraph,
    rng: &mut R,
) -> AuthorTaskGraph {
    let p = er_density_probability(profile, article_ref.n_edges(), article_ref.n_authors());
    let n_tasks = profile.task_nodes();
    let tasks: Vec<String> = (0..n_tasks)
        .map(|i| {
            article_ref
                .tasks()
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("null-task-{i}"))
        })
        .collect();
    let mut edges = Vec::new();
    for a in 0..article_ref.n_authors() {
        for t in 0..n_tasks {
            if rng.random_bool(p) {
                edges.push((a, t));
            }
        }
    }
    AuthorTaskGraph::with_isolated(
        article_ref.article_id(),
        article_ref.authors().to_vec(),
        tasks,
        edges,
    )
    .expect("template has authors and the cohort has at least one task")
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// FNV-1a, used only to fold article identifiers into stream seeds.
fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Seed of the independent stream for `(seed, index, label)`.
pub fn stream_seed(seed: u64, index: u64, label: &str) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(index)) ^ fnv1a(label.as_bytes()))
}

pub fn stream_rng(seed: u64, index: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, index, label))
}
