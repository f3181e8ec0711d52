//! Comparisons of observed articles against the null ensembles.
//!
//! | id  | question                                           | null models |
//! |-----|----------------------------------------------------|-------------|
//! | H01 | density distribution                               | erd         |
//! | H2  | how often each role occurs in an article           | cfm, erm    |
//! | H3  | share of authors holding each role                 | cfm, erm    |
//! | H4  | role counts in articles with a non-team-player     | cfm, erm    |
//! | H5  | which of the common five tasks each role performs  | cfm, erm    |
//! | H6  | which less frequent tasks each role performs       | cfm, erm    |
//!
//! Every comparison is a two-sample KS test. Per team size the samples are
//! per-article values; for H2 the overall entry compares the team-size
//! distribution of articles containing the role. Task comparisons (H5, H6)
//! use one value per participation: the task's position among the common
//! five, or its frequency rank among the remaining tasks.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

use crate::metrics::ArticleSummary;
use crate::nullmodel::NullModel;
use crate::projection::CollaboratorRole;
use crate::stats::{ks_two_sample_with, KsMethod, KsResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Hypothesis {
    H01,
    H2,
    H3,
    H4,
    H5,
    H6,
}

impl Hypothesis {
    pub const ALL: [Hypothesis; 6] = [
        Hypothesis::H01,
        Hypothesis::H2,
        Hypothesis::H3,
        Hypothesis::H4,
        Hypothesis::H5,
        Hypothesis::H6,
    ];

    pub fn description(self) -> &'static str {
        match self {
            Hypothesis::H01 => "graph density distribution matches the density null",
            Hypothesis::H2 => "the three roles are equally common across articles",
            Hypothesis::H3 => "the three roles hold equal shares of all authors",
            Hypothesis::H4 => "role counts are equal in articles with non-team-players",
            Hypothesis::H5 => "the roles contribute equally to the common five tasks",
            Hypothesis::H6 => "the roles contribute equally to less frequent tasks",
        }
    }

    fn models(self) -> &'static [NullModel] {
        match self {
            Hypothesis::H01 => &[NullModel::ErDensity],
            _ => &[NullModel::Cfm, NullModel::Erm],
        }
    }

    fn per_role(self) -> bool {
        self != Hypothesis::H01
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CohortKey {
    TeamSize(usize),
    Overall,
}

impl fmt::Display for CohortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CohortKey::TeamSize(k) => write!(f, "{k}"),
            CohortKey::Overall => f.write_str("overall"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "snake_case"))]
pub enum TestOutcome {
    Computed {
        #[cfg_attr(feature = "serde", serde(flatten))]
        ks: KsResult,
        stars: &'static str,
    },
    NotComputed {
        reason: String,
    },
}

impl TestOutcome {
    pub fn ks(&self) -> Option<&KsResult> {
        match self {
            TestOutcome::Computed { ks, .. } => Some(ks),
            TestOutcome::NotComputed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HypothesisTest {
    pub model: NullModel,
    pub role: Option<CollaboratorRole>,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HypothesisEntry {
    pub hypothesis: Hypothesis,
    pub cohort: CohortKey,
    pub n_articles: usize,
    pub tests: Vec<HypothesisTest>,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct HypothesisReport {
    pub entries: Vec<HypothesisEntry>,
}

impl HypothesisReport {
    pub fn entry(&self, hypothesis: Hypothesis, cohort: CohortKey) -> Option<&HypothesisEntry> {
        self.entries
            .iter()
            .find(|e| e.hypothesis == hypothesis && e.cohort == cohort)
    }
}

/// Inputs shared by every comparison.
#[derive(Debug, Clone)]
pub struct ReportInput<'a> {
    pub empirical: &'a [ArticleSummary],
    pub nulls: &'a BTreeMap<NullModel, Vec<ArticleSummary>>,
    pub common_five: &'a [String],
    pub min_team: usize,
    pub max_team: usize,
    pub ks_method: KsMethod,
}

/// Frequency ranks of less frequent tasks: observed order first, then
/// tasks seen only in null samples alphabetically.
struct TaskRanks(BTreeMap<String, usize>);

impl TaskRanks {
    fn new(input: &ReportInput<'_>) -> Self {
        let mut observed: BTreeMap<&str, u64> = BTreeMap::new();
        for a in input.empirical {
            for m in &a.role_tasks {
                for (t, n) in m {
                    if !input.common_five.contains(t) {
                        *observed.entry(t.as_str()).or_insert(0) += n;
                    }
                }
            }
        }
        let mut order: Vec<(&str, u64)> = observed.into_iter().collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let mut ranks: BTreeMap<String, usize> = order
            .iter()
            .enumerate()
            .map(|(i, (t, _))| (t.to_string(), i))
            .collect();
        let mut extra: Vec<&str> = input
            .nulls
            .values()
            .flatten()
            .flat_map(|a| a.role_tasks.iter().flat_map(|m| m.keys()))
            .filter(|t| !input.common_five.contains(t) && !ranks.contains_key(t.as_str()))
            .map(String::as_str)
            .collect();
        extra.sort_unstable();
        extra.dedup();
        for t in extra {
            let next = ranks.len();
            ranks.insert(t.to_string(), next);
        }
        Self(ranks)
    }
}

fn sample(
    hypothesis: Hypothesis,
    cohort: CohortKey,
    articles: &[&ArticleSummary],
    role: Option<CollaboratorRole>,
    common_five: &[String],
    ranks: &TaskRanks,
) -> Vec<f64> {
    let role_of = || role.expect("role-level hypothesis");
    match hypothesis {
        Hypothesis::H01 => articles.iter().map(|a| a.density).collect(),
        Hypothesis::H2 => {
            let r = role_of();
            match cohort {
                CohortKey::TeamSize(_) => articles
                    .iter()
                    .map(|a| if a.roles.contains(r) { 1.0 } else { 0.0 })
                    .collect(),
                CohortKey::Overall => articles
                    .iter()
                    .filter(|a| a.roles.contains(r))
                    .map(|a| a.team_size as f64)
                    .collect(),
            }
        }
        Hypothesis::H3 => {
            let r = role_of();
            articles
                .iter()
                .map(|a| f64::from(a.roles.get(r)) / a.team_size as f64)
                .collect()
        }
        Hypothesis::H4 => {
            let r = role_of();
            articles
                .iter()
                .filter(|a| a.roles.has_non_team_player())
                .map(|a| f64::from(a.roles.get(r)))
                .collect()
        }
        Hypothesis::H5 | Hypothesis::H6 => {
            let r = role_of();
            let mut out = Vec::new();
            for a in articles {
                for (task, &n) in &a.role_tasks[r.index()] {
                    let value = match (hypothesis, common_five.iter().position(|c| c == task)) {
                        (Hypothesis::H5, Some(i)) => i,
                        (Hypothesis::H6, None) => ranks.0[task],
                        _ => continue,
                    };
                    out.extend(core::iter::repeat_n(value as f64, n as usize));
                }
            }
            out
        }
    }
}

fn select(
    articles: &[ArticleSummary],
    cohort: CohortKey,
    min: usize,
    max: usize,
) -> Vec<&ArticleSummary> {
    articles
        .iter()
        .filter(|a| match cohort {
            CohortKey::TeamSize(k) => a.team_size == k,
            CohortKey::Overall => (min..=max).contains(&a.team_size),
        })
        .collect()
}

/// One entry per hypothesis per observed team size, plus an overall entry
/// per hypothesis. Missing null runs and empty samples are reported as
/// not computed.
pub fn hypothesis_report(input: &ReportInput<'_>) -> HypothesisReport {
    let ranks = TaskRanks::new(input);
    let mut sizes: Vec<usize> = input
        .empirical
        .iter()
        .map(|a| a.team_size)
        .filter(|k| (input.min_team..=input.max_team).contains(k))
        .collect();
    sizes.sort_unstable();
    sizes.dedup();
    let cohorts: Vec<CohortKey> = sizes
        .into_iter()
        .map(CohortKey::TeamSize)
        .chain([CohortKey::Overall])
        .collect();

    let mut entries = Vec::new();
    for hypothesis in Hypothesis::ALL {
        for &cohort in &cohorts {
            let observed = select(input.empirical, cohort, input.min_team, input.max_team);
            let roles: Vec<Option<CollaboratorRole>> = if hypothesis.per_role() {
                CollaboratorRole::ALL.into_iter().map(Some).collect()
            } else {
                vec![None]
            };
            let mut tests = Vec::new();
            for &model in hypothesis.models() {
                let null_articles = input.nulls.get(&model);
                for &role in &roles {
                    let outcome = match null_articles {
                        None => TestOutcome::NotComputed {
                            reason: format!("no {model} null run supplied"),
                        },
                        Some(null_articles) => {
                            let null =
                                select(null_articles, cohort, input.min_team, input.max_team);
                            let x = sample(
                                hypothesis,
                                cohort,
                                &observed,
                                role,
                                input.common_five,
                                &ranks,
                            );
                            let y =
                                sample(hypothesis, cohort, &null, role, input.common_five, &ranks);
                            if x.is_empty() {
                                TestOutcome::NotComputed {
                                    reason: "empty observed sample".into(),
                                }
                            } else if y.is_empty() {
                                TestOutcome::NotComputed {
                                    reason: "empty null sample".into(),
                                }
                            } else {
                                let ks = ks_two_sample_with(&x, &y, input.ks_method)
                                    .expect("finite non-empty samples");
                                TestOutcome::Computed {
                                    stars: ks.stars(),
                                    ks,
                                }
                            }
                        }
                    };
                    tests.push(HypothesisTest {
                        model,
                        role,
                        outcome,
                    });
                }
            }
            entries.push(HypothesisEntry {
                hypothesis,
                cohort,
                n_articles: observed.len(),
                tests,
            });
        }
    }
    HypothesisReport { entries }
}
