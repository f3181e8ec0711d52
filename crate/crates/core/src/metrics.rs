//! Per-article summaries and per-team-size cohort statistics.
//!
//! Ratios are exact fractions so the partition identities (population
//! ratios summing to one, average count equal to ratio times team size)
//! hold without rounding; `f64` views are for reporting.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;

use crate::graph::{normalized_density, AuthorTaskGraph};
use crate::nullmodel::stream_seed;
use crate::projection::{classify, project, ClassifyError, CollaboratorRole};
use crate::stats::{bootstrap_cis, StatsError};

pub type Fraction = Ratio<u64>;

pub const DEFAULT_MIN_COHORT_ARTICLES: usize = 5;
pub const DEFAULT_TOP_K: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetricsError {
    EmptyCohort,
    /// An article's role counts do not add up to the cohort team size.
    MixedTeamSizes {
        expected: usize,
        found: usize,
    },
    Stats(StatsError),
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::EmptyCohort => f.write_str("cohort has no articles"),
            MetricsError::MixedTeamSizes { expected, found } => {
                write!(
                    f,
                    "article with {found} classified authors in a cohort of team size {expected}"
                )
            }
            MetricsError::Stats(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MetricsError {}

impl From<StatsError> for MetricsError {
    fn from(e: StatsError) -> Self {
        MetricsError::Stats(e)
    }
}

/// Number of authors holding each role in one article.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoleCounts([u32; 3]);

impl RoleCounts {
    pub fn new(specialist: u32, versatile: u32, team_player: u32) -> Self {
        Self([specialist, versatile, team_player])
    }

    pub fn from_roles<'a>(roles: impl IntoIterator<Item = &'a CollaboratorRole>) -> Self {
        let mut c = Self::default();
        for r in roles {
            c.0[r.index()] += 1;
        }
        c
    }

    pub fn get(&self, role: CollaboratorRole) -> u32 {
        self.0[role.index()]
    }

    pub fn contains(&self, role: CollaboratorRole) -> bool {
        self.get(role) > 0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// At least one specialist or versatile.
    pub fn has_non_team_player(&self) -> bool {
        self.contains(CollaboratorRole::Specialist) || self.contains(CollaboratorRole::Versatile)
    }
}

/// Everything the cohort statistics need from one article (observed or null).
#[derive(Debug, Clone, PartialEq)]
pub struct ArticleSummary {
    pub article_id: String,
    pub team_size: usize,
    pub n_tasks: usize,
    pub n_edges: usize,
    pub density: f64,
    pub roles: RoleCounts,
    /// Task participations by authors of each role, indexed by role.
    pub role_tasks: [BTreeMap<String, u64>; 3],
}

impl ArticleSummary {
    /// Project and classify a graph whose authors all carry weight.
    pub fn from_graph(g: &AuthorTaskGraph) -> Result<Self, ClassifyError> {
        let roles = classify(&project(g))?;
        let roles: Vec<Option<CollaboratorRole>> = roles.into_iter().map(Some).collect();
        Ok(Self::assemble(g, &roles))
    }

    /// Like [`from_graph`](Self::from_graph) but authors without edges are
    /// left unclassified; used for the density null.
    pub fn from_graph_lenient(g: &AuthorTaskGraph) -> Self {
        Self::assemble(g, &project(g).roles_lenient())
    }

    /// Summary from an already classified graph; `roles` aligns with authors.
    pub fn assemble(g: &AuthorTaskGraph, roles: &[Option<CollaboratorRole>]) -> Self {
        let mut role_tasks: [BTreeMap<String, u64>; 3] = Default::default();
        for &(a, t) in g.edges() {
            if let Some(role) = roles[a] {
                *role_tasks[role.index()]
                    .entry(g.tasks()[t].clone())
                    .or_insert(0) += 1;
            }
        }
        Self {
            article_id: g.article_id().into(),
            team_size: g.n_authors(),
            n_tasks: g.n_tasks(),
            n_edges: g.n_edges(),
            density: normalized_density(g),
            roles: RoleCounts::from_roles(roles.iter().flatten()),
            role_tasks,
        }
    }

    pub fn participations(&self) -> u64 {
        self.role_tasks.iter().flat_map(|m| m.values()).sum()
    }
}

fn nonempty(cohort: &[RoleCounts]) -> Result<u64, MetricsError> {
    if cohort.is_empty() {
        Err(MetricsError::EmptyCohort)
    } else {
        Ok(cohort.len() as u64)
    }
}

/// Share of articles with at least one author of `role`.
pub fn prevalence_ratio(
    cohort: &[RoleCounts],
    role: CollaboratorRole,
) -> Result<Fraction, MetricsError> {
    let n = nonempty(cohort)?;
    let with_role = cohort.iter().filter(|c| c.contains(role)).count() as u64;
    Ok(Fraction::new(with_role, n))
}

/// Mean number of `role` authors per article.
pub fn avg_count(cohort: &[RoleCounts], role: CollaboratorRole) -> Result<Fraction, MetricsError> {
    let n = nonempty(cohort)?;
    let total: u64 = cohort.iter().map(|c| u64::from(c.get(role))).sum();
    Ok(Fraction::new(total, n))
}

/// Share of all author slots in a cohort of `team_size` held by `role`.
pub fn population_ratio(
    cohort: &[RoleCounts],
    team_size: usize,
    role: CollaboratorRole,
) -> Result<Fraction, MetricsError> {
    let n = nonempty(cohort)?;
    if let Some(c) = cohort.iter().find(|c| c.total() as usize != team_size) {
        return Err(MetricsError::MixedTeamSizes {
            expected: team_size,
            found: c.total() as usize,
        });
    }
    let total: u64 = cohort.iter().map(|c| u64::from(c.get(role))).sum();
    Ok(Fraction::new(total, team_size as u64 * n))
}

pub fn to_f64(r: Fraction) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Prevalence,
    AvgCount,
    PopulationRatio,
}

impl Metric {
    pub const ALL: [Metric; 3] = [
        Metric::Prevalence,
        Metric::AvgCount,
        Metric::PopulationRatio,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Prevalence => "pr",
            Metric::AvgCount => "ac",
            Metric::PopulationRatio => "rc",
        }
    }
}

/// Bootstrap settings for cohort intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapSpec {
    pub iterations: u32,
    pub level: f64,
    pub seed: u64,
}

/// Aggregates for all articles of one team size.
#[derive(Debug, Clone, PartialEq)]
pub struct CohortStats {
    pub team_size: usize,
    pub n_articles: usize,
    pub pr: [Fraction; 3],
    pub ac: [Fraction; 3],
    pub rc: [Fraction; 3],
    pub density_samples: Vec<f64>,
    pub ci: BTreeMap<(Metric, CollaboratorRole), (f64, f64)>,
    /// Fewer articles than the configured minimum; reported, not dropped.
    pub low_n: bool,
}

impl CohortStats {
    /// Statistics for `articles`, which must all have `team_size` authors.
    pub fn compute(
        team_size: usize,
        articles: &[&ArticleSummary],
        bootstrap: Option<BootstrapSpec>,
        min_articles: usize,
    ) -> Result<Self, MetricsError> {
        let counts: Vec<RoleCounts> = articles.iter().map(|a| a.roles).collect();
        let mut pr = [Fraction::from_integer(0); 3];
        let mut ac = pr;
        let mut rc = pr;
        for role in CollaboratorRole::ALL {
            let i = role.index();
            pr[i] = prevalence_ratio(&counts, role)?;
            ac[i] = avg_count(&counts, role)?;
            rc[i] = population_ratio(&counts, team_size, role)?;
        }

        let mut ci = BTreeMap::new();
        if let Some(spec) = bootstrap {
            let seed = stream_seed(spec.seed, team_size as u64, "cohort");
            let intervals = bootstrap_cis(
                &counts,
                |sample| {
                    let mut out = Vec::with_capacity(9);
                    for role in CollaboratorRole::ALL {
                        out.push(to_f64(
                            prevalence_ratio(sample, role).expect("resample is non-empty"),
                        ));
                        out.push(to_f64(
                            avg_count(sample, role).expect("resample is non-empty"),
                        ));
                        out.push(to_f64(
                            population_ratio(sample, team_size, role)
                                .expect("resample keeps team sizes"),
                        ));
                    }
                    out
                },
                spec.iterations,
                spec.level,
                seed,
            )?;
            for (r, role) in CollaboratorRole::ALL.into_iter().enumerate() {
                for (m, metric) in Metric::ALL.into_iter().enumerate() {
                    ci.insert((metric, role), intervals[r * 3 + m]);
                }
            }
        }

        Ok(Self {
            team_size,
            n_articles: articles.len(),
            pr,
            ac,
            rc,
            density_samples: articles.iter().map(|a| a.density).collect(),
            ci,
            low_n: articles.len() < min_articles,
        })
    }

    pub fn value(&self, metric: Metric, role: CollaboratorRole) -> Fraction {
        let i = role.index();
        match metric {
            Metric::Prevalence => self.pr[i],
            Metric::AvgCount => self.ac[i],
            Metric::PopulationRatio => self.rc[i],
        }
    }
}

/// Group articles by team size within `[min_team, max_team]`.
pub fn cohorts(
    articles: &[ArticleSummary],
    min_team: usize,
    max_team: usize,
) -> BTreeMap<usize, Vec<&ArticleSummary>> {
    let mut out: BTreeMap<usize, Vec<&ArticleSummary>> = BTreeMap::new();
    for a in articles
        .iter()
        .filter(|a| (min_team..=max_team).contains(&a.team_size))
    {
        out.entry(a.team_size).or_default().push(a);
    }
    out
}

/// Task participation counts of one role.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskProfile {
    pub role: CollaboratorRole,
    pub task_counts: BTreeMap<String, u64>,
}

impl TaskProfile {
    pub fn from_articles<'a>(
        articles: impl IntoIterator<Item = &'a ArticleSummary>,
        role: CollaboratorRole,
    ) -> Self {
        let mut task_counts = BTreeMap::new();
        for a in articles {
            for (task, n) in &a.role_tasks[role.index()] {
                *task_counts.entry(task.clone()).or_insert(0) += n;
            }
        }
        Self { role, task_counts }
    }

    pub fn total(&self) -> u64 {
        self.task_counts.values().sum()
    }

    /// The `k` most frequent tasks, count descending then label ascending.
    pub fn top_k(&self, k: usize) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self
            .task_counts
            .iter()
            .map(|(t, &n)| (t.as_str(), n))
            .collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v.truncate(k);
        v
    }

    /// Counts for `common` in the given order, zero where absent.
    pub fn common_slice<'a>(&self, common: &'a [String]) -> Vec<(&'a str, u64)> {
        common
            .iter()
            .map(|t| (t.as_str(), self.task_counts.get(t).copied().unwrap_or(0)))
            .collect()
    }

    /// Top-k tasks outside `common`.
    pub fn remainder(&self, common: &[String], k: usize) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self
            .task_counts
            .iter()
            .filter(|(t, _)| !common.contains(t))
            .map(|(t, &n)| (t.as_str(), n))
            .collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v.truncate(k);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::statement::DEFAULT_COMMON_FIVE;
    use crate::synth;
    use alloc::string::ToString;
    use alloc::vec;
    use CollaboratorRole::*;

    fn frac(n: u64, d: u64) -> Fraction {
        Fraction::new(n, d)
    }

    #[test]
    fn prevalence_counts_articles() {
        let cohort = [
            RoleCounts::new(1, 0, 2),
            RoleCounts::new(0, 0, 3),
            RoleCounts::new(0, 1, 2),
            RoleCounts::new(0, 0, 3),
        ];
        assert_eq!(prevalence_ratio(&cohort, Specialist).unwrap(), frac(1, 4));
        assert_eq!(prevalence_ratio(&cohort, TeamPlayer).unwrap(), frac(1, 1));
        assert_eq!(
            prevalence_ratio(&[], Specialist),
            Err(MetricsError::EmptyCohort)
        );
    }

    #[test]
    fn average_and_population_ratio() {
        let cohort = [RoleCounts::new(1, 1, 1), RoleCounts::new(0, 0, 3)];
        assert_eq!(avg_count(&cohort, Specialist).unwrap(), frac(1, 2));
        assert_eq!(avg_count(&cohort, Versatile).unwrap(), frac(1, 2));
        assert_eq!(avg_count(&cohort, TeamPlayer).unwrap(), frac(2, 1));
        assert_eq!(
            population_ratio(&cohort, 3, Specialist).unwrap(),
            frac(1, 6)
        );
        assert_eq!(population_ratio(&cohort, 3, Versatile).unwrap(), frac(1, 6));
        assert_eq!(
            population_ratio(&cohort, 3, TeamPlayer).unwrap(),
            frac(2, 3)
        );
        assert_eq!(
            population_ratio(&cohort, 4, TeamPlayer),
            Err(MetricsError::MixedTeamSizes {
                expected: 4,
                found: 3
            })
        );
        let single = [RoleCounts::new(2, 0, 1)];
        assert_eq!(avg_count(&single, Specialist).unwrap(), frac(2, 1));
        let all_spec = [RoleCounts::new(4, 0, 0); 3];
        assert_eq!(
            population_ratio(&all_spec, 4, Specialist).unwrap(),
            frac(1, 1)
        );
    }

    #[test]
    fn all_solo_cohort_is_all_specialist() {
        let articles: Vec<ArticleSummary> = (0..5)
            .map(|i| {
                let g =
                    synth::graph_from_rows(&i.to_string(), &[("a", "X"), ("b", "Y"), ("c", "Z")]);
                ArticleSummary::from_graph(&g).unwrap()
            })
            .collect();
        let counts: Vec<RoleCounts> = articles.iter().map(|a| a.roles).collect();
        assert_eq!(prevalence_ratio(&counts, Specialist).unwrap(), frac(1, 1));
    }

    #[test]
    fn sample_article_summary_and_profile() {
        let g = build_graph(&synth::sample_article());
        let a = ArticleSummary::from_graph(&g).unwrap();
        assert_eq!(a.roles, RoleCounts::new(0, 0, 7));
        assert_eq!(a.density, 0.5);
        let profile = TaskProfile::from_articles([&a], TeamPlayer);
        let common: Vec<String> = DEFAULT_COMMON_FIVE.iter().map(|s| s.to_string()).collect();
        let slice: Vec<u64> = profile
            .common_slice(&common)
            .into_iter()
            .map(|(_, n)| n)
            .collect();
        assert_eq!(slice, vec![3, 5, 6, 5, 2]);
        assert!(profile.remainder(&common, 100).is_empty());
        assert_eq!(TaskProfile::from_articles([&a], Specialist).total(), 0);
        assert_eq!(TaskProfile::from_articles([&a], Versatile).total(), 0);

        let cohort = [a.roles];
        assert_eq!(avg_count(&cohort, TeamPlayer).unwrap(), frac(7, 1));
        assert_eq!(avg_count(&cohort, Specialist).unwrap(), frac(0, 1));
    }

    #[test]
    fn solo_supervision_lands_in_specialist_profile() {
        let g = synth::graph_from_rows(
            "s",
            &[("supervised the research", "P"), ("wrote the paper", "A B")],
        );
        let a = ArticleSummary::from_graph(&g).unwrap();
        let profile = TaskProfile::from_articles([&a], Specialist);
        assert_eq!(profile.task_counts.get("supervised the research"), Some(&1));
    }

    #[test]
    fn top_k_orders_by_count_then_label() {
        let profile = TaskProfile {
            role: Versatile,
            task_counts: [("b", 2u64), ("a", 2), ("c", 5), ("d", 1)]
                .into_iter()
                .map(|(t, n)| (t.to_string(), n))
                .collect(),
        };
        assert_eq!(profile.top_k(3), vec![("c", 5), ("a", 2), ("b", 2)]);
    }

    #[test]
    fn cohort_stats_with_intervals() {
        let articles: Vec<ArticleSummary> = synth::mixed_corpus(3, 40, 17)
            .iter()
            .map(|s| ArticleSummary::from_graph(&build_graph(s)).unwrap())
            .collect();
        let groups = cohorts(&articles, 2, 20);
        let (k, members) = groups.iter().next().unwrap();
        let spec = BootstrapSpec {
            iterations: 300,
            level: 0.95,
            seed: 4,
        };
        let stats = CohortStats::compute(*k, members, Some(spec), 5).unwrap();
        assert_eq!(stats.ci.len(), 9);
        for role in CollaboratorRole::ALL {
            for metric in Metric::ALL {
                let (lo, hi) = stats.ci[&(metric, role)];
                assert!(lo <= hi);
                assert!(lo >= 0.0 && hi <= *k as f64);
            }
        }
        assert!(!stats.low_n);
        let again = CohortStats::compute(*k, members, Some(spec), 5).unwrap();
        assert_eq!(stats, again);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn partition_identities(
                k in 2usize..21,
                rows in proptest::collection::vec((0u32..21, 0u32..21), 1..30),
            ) {
                let cohort: Vec<RoleCounts> = rows.iter().map(|&(s, v)| {
                    let s = s.min(k as u32);
                    let v = v.min(k as u32 - s);
                    RoleCounts::new(s, v, k as u32 - s - v)
                }).collect();
                let mut sum = Fraction::from_integer(0);
                for role in CollaboratorRole::ALL {
                    let rc = population_ratio(&cohort, k, role).unwrap();
                    let ac = avg_count(&cohort, role).unwrap();
                    let pr = prevalence_ratio(&cohort, role).unwrap();
                    prop_assert_eq!(ac, rc * Fraction::from_integer(k as u64));
                    prop_assert_eq!(*pr.numer() == 0, *rc.numer() == 0);
                    prop_assert!(pr <= Fraction::from_integer(1));
                    sum += rc;
                }
                prop_assert_eq!(sum, Fraction::from_integer(1));
            }
        }
    }
}
