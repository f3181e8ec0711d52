//! Core algorithms for author-task contribution networks.
//!
//! Everything here is pure computation over in-memory values and builds
//! under `no_std` with `alloc`:
//!
//! - [`statement`]: contribution statement tokenizing and task normalization.
//! - [`graph`]: per-article author-task bipartite graphs and normalized density.
//! - [`projection`]: the self-loop preserving one-mode projection and
//!   collaborator roles.
//! - [`nullmodel`]: configuration-model, edge-count and density-calibrated
//!   random bipartite graphs.
//! - [`stats`]: two-sample Kolmogorov-Smirnov and percentile bootstrap.
//! - [`metrics`]: cohort prevalence / count / population ratios and task profiles.
//! - [`hypothesis`]: the six-hypothesis comparison report.
//! - [`synth`]: synthetic corpora with controlled division of labor.
//!
//! File formats, IO and the command line live in the `contribnet` crate.
#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod graph;
pub mod hypothesis;
pub mod metrics;
pub mod nullmodel;
pub mod projection;
pub mod statement;
pub mod stats;
pub mod synth;

pub use graph::{normalized_density, AuthorTaskGraph, GraphError};
pub use metrics::{ArticleSummary, CohortStats, RoleCounts, TaskProfile};
pub use nullmodel::{CohortProfile, NullModel, NullModelConfig, NullModelError};
pub use projection::{classify, project, CoContribNetwork, CollaboratorRole};
pub use statement::{parse_statement, AuthorTaskPair, ParsedStatement, TaskLexicon};
pub use stats::{bootstrap_ci, ks_two_sample, KsResult};
