//! `analyze`: cohort statistics, task profiles, hypothesis tests and the
//! plot-ready tables.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use contribnet_core::graph::{build_graph, AuthorTaskGraph};
use contribnet_core::hypothesis::{hypothesis_report, HypothesisReport, ReportInput};
use contribnet_core::metrics::{
    cohorts, to_f64, ArticleSummary, BootstrapSpec, CohortStats, Metric, TaskProfile,
};
use contribnet_core::nullmodel::NullModel;
use contribnet_core::projection::CollaboratorRole;
use contribnet_core::stats::KsMethod;
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::{Error, Result};
use crate::lexicon::LoadedLexicon;
use crate::records::{read_jsonl, GraphRecord, JsonlWriter, NullRecord, ParsedCorpus};

pub const ARTICLES: &str = "articles.jsonl";
pub const COHORT_STATS: &str = "cohort_stats.csv";
pub const DENSITY: &str = "density.csv";
pub const TASK_PROFILES: &str = "task_profiles.csv";
pub const HYPOTHESES: &str = "hypotheses.json";
pub const FIGURE_DENSITY: &str = "figure_density.csv";
pub const FIGURE_ROLES: &str = "figure_roles.csv";
pub const FIGURE_TASKS: &str = "figure_task_profiles.csv";
pub const GRAPH_DIR: &str = "graphs";

#[derive(Debug, Clone, Default, Serialize)]
pub struct AnalyzeSummary {
    pub articles: usize,
    pub in_range: usize,
    pub cohorts: usize,
    pub low_n_cohorts: usize,
    pub null_records: BTreeMap<String, usize>,
    /// Every file written, in order.
    #[serde(skip)]
    pub outputs: Vec<PathBuf>,
}

/// Null replicate summaries grouped by model.
pub fn load_nulls(
    paths: &[PathBuf],
    expected_fingerprint: Option<&str>,
) -> Result<BTreeMap<NullModel, Vec<ArticleSummary>>> {
    let mut out: BTreeMap<NullModel, Vec<ArticleSummary>> = BTreeMap::new();
    for path in paths {
        for (_, rec) in read_jsonl::<NullRecord>(path)? {
            let rec = rec?;
            if let Some(fp) = expected_fingerprint {
                if rec.article.lexicon_fingerprint != fp {
                    return Err(Error::ConfigMismatch {
                        expected: fp.to_string(),
                        found: rec.article.lexicon_fingerprint,
                    });
                }
            }
            out.entry(rec.model)
                .or_default()
                .push(rec.article.summary());
        }
    }
    Ok(out)
}

/// Refuse data parsed under a different lexicon.
pub fn check_lexicon(corpus: &ParsedCorpus, lexicon: &LoadedLexicon) -> Result<()> {
    match &corpus.lexicon_fingerprint {
        Some(found) if *found != lexicon.fingerprint => Err(Error::ConfigMismatch {
            expected: lexicon.fingerprint.clone(),
            found: found.clone(),
        }),
        _ => Ok(()),
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Write every report file into `out_dir`.
pub fn analyze(
    corpus: &ParsedCorpus,
    null_paths: &[PathBuf],
    lexicon: &LoadedLexicon,
    config: &Config,
    out_dir: &Path,
    dump_graphs: bool,
) -> Result<AnalyzeSummary> {
    check_lexicon(corpus, lexicon)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let fingerprint = lexicon.fingerprint.as_str();
    let nulls = load_nulls(null_paths, Some(fingerprint))?;

    let graphs: Vec<AuthorTaskGraph> = corpus.statements.par_iter().map(build_graph).collect();
    let records: Vec<GraphRecord> = graphs
        .par_iter()
        .map(|g| GraphRecord::from_graph(g, fingerprint))
        .collect();
    let bounds = config.min_team..=config.max_team;
    let empirical: Vec<ArticleSummary> = records
        .iter()
        .filter(|r| bounds.contains(&r.n_authors))
        .map(GraphRecord::summary)
        .collect();

    let mut summary = AnalyzeSummary {
        articles: records.len(),
        in_range: empirical.len(),
        null_records: nulls
            .iter()
            .map(|(m, v)| (m.as_str().to_string(), v.len()))
            .collect(),
        ..Default::default()
    };

    let path = out_dir.join(ARTICLES);
    let mut w = JsonlWriter::create(&path)?;
    for r in &records {
        w.write(r)?;
    }
    w.finish()?;
    summary.outputs.push(path);

    // cohort statistics
    let spec = (config.bootstrap > 0).then_some(BootstrapSpec {
        iterations: config.bootstrap,
        level: config.level,
        seed: config.seed,
    });
    let groups = cohorts(&empirical, config.min_team, config.max_team);
    let stats: Vec<CohortStats> = groups
        .par_iter()
        .map(|(&k, arts)| CohortStats::compute(k, arts, spec, config.min_cohort_articles))
        .collect::<std::result::Result<_, _>>()?;
    summary.cohorts = stats.len();
    summary.low_n_cohorts = stats.iter().filter(|s| s.low_n).count();
    for s in stats.iter().filter(|s| s.low_n) {
        warn!("team size {}: only {} articles", s.team_size, s.n_articles);
    }

    let path = out_dir.join(COHORT_STATS);
    write_cohort_stats(&path, &stats)?;
    summary.outputs.push(path);

    let path = out_dir.join(DENSITY);
    let mut w = csv_writer(&path)?;
    w.write_record([
        "article_id",
        "cohort",
        "in_range",
        "n_authors",
        "n_tasks",
        "k_edges",
        "density",
    ])?;
    for r in &records {
        w.write_record([
            r.article_id.clone(),
            r.n_authors.to_string(),
            bounds.contains(&r.n_authors).to_string(),
            r.n_authors.to_string(),
            r.n_tasks.to_string(),
            r.k_edges.to_string(),
            r.density.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    summary.outputs.push(path);

    let common: Vec<String> = lexicon.lexicon.common_five().to_vec();
    let path = out_dir.join(TASK_PROFILES);
    let mut w = csv_writer(&path)?;
    w.write_record(["role", "task", "count", "common_five", "rank", "top_k"])?;
    for role in CollaboratorRole::ALL {
        let profile = TaskProfile::from_articles(&empirical, role);
        for (rank, (task, count)) in profile.top_k(usize::MAX).into_iter().enumerate() {
            w.write_record([
                role.as_str().to_string(),
                task.to_string(),
                count.to_string(),
                common.iter().any(|c| c == task).to_string(),
                (rank + 1).to_string(),
                (rank < config.top_k).to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    summary.outputs.push(path);

    let report = hypothesis_report(&ReportInput {
        empirical: &empirical,
        nulls: &nulls,
        common_five: &common,
        min_team: config.min_team,
        max_team: config.max_team,
        ks_method: config.ks_method,
    });
    let path = out_dir.join(HYPOTHESES);
    write_hypotheses(&path, &report, fingerprint, config)?;
    summary.outputs.push(path);

    let path = out_dir.join(FIGURE_DENSITY);
    write_figure_density(&path, &empirical, &nulls)?;
    summary.outputs.push(path);

    let path = out_dir.join(FIGURE_ROLES);
    write_figure_roles(&path, &stats, &nulls, config)?;
    summary.outputs.push(path);

    let path = out_dir.join(FIGURE_TASKS);
    write_figure_tasks(&path, &empirical, &nulls, &common)?;
    summary.outputs.push(path);

    if dump_graphs {
        let dir = out_dir.join(GRAPH_DIR);
        summary
            .outputs
            .extend(crate::graphdump::dump_all(&dir, &graphs)?);
    }
    info!(
        "analyzed {} articles in {} cohorts",
        summary.in_range, summary.cohorts
    );
    Ok(summary)
}

fn write_cohort_stats(path: &Path, stats: &[CohortStats]) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec![
        "k".to_string(),
        "n_articles".into(),
        "low_n".into(),
        "role".into(),
    ];
    for m in Metric::ALL {
        let m = m.as_str();
        header.extend([m.to_string(), format!("{m}_ci_low"), format!("{m}_ci_high")]);
    }
    w.write_record(&header)?;
    for s in stats {
        for role in CollaboratorRole::ALL {
            let mut row = vec![
                s.team_size.to_string(),
                s.n_articles.to_string(),
                s.low_n.to_string(),
                role.as_str().to_string(),
            ];
            for m in Metric::ALL {
                let ci = s.ci.get(&(m, role));
                row.extend([
                    to_f64(s.value(m, role)).to_string(),
                    opt(ci.map(|c| c.0)),
                    opt(ci.map(|c| c.1)),
                ]);
            }
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Serialize)]
struct HypothesesFile<'a> {
    lexicon_fingerprint: &'a str,
    min_team: usize,
    max_team: usize,
    ks_method: KsMethod,
    #[serde(flatten)]
    report: &'a HypothesisReport,
}

fn write_hypotheses(
    path: &Path,
    report: &HypothesisReport,
    fingerprint: &str,
    config: &Config,
) -> Result<()> {
    let file = HypothesesFile {
        lexicon_fingerprint: fingerprint,
        min_team: config.min_team,
        max_team: config.max_team,
        ks_method: config.ks_method,
        report,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("report serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn sources<'a>(
    empirical: &'a [ArticleSummary],
    nulls: &'a BTreeMap<NullModel, Vec<ArticleSummary>>,
) -> impl Iterator<Item = (&'static str, &'a [ArticleSummary])> {
    std::iter::once(("empirical", empirical))
        .chain(nulls.iter().map(|(m, v)| (m.as_str(), v.as_slice())))
}

fn write_figure_density(
    path: &Path,
    empirical: &[ArticleSummary],
    nulls: &BTreeMap<NullModel, Vec<ArticleSummary>>,
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["source", "k", "article_id", "density"])?;
    for (source, arts) in sources(empirical, nulls) {
        for a in arts {
            w.write_record([
                source,
                &a.team_size.to_string(),
                &a.article_id,
                &a.density.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn write_figure_roles(
    path: &Path,
    empirical: &[CohortStats],
    nulls: &BTreeMap<NullModel, Vec<ArticleSummary>>,
    config: &Config,
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "source",
        "k",
        "n_articles",
        "role",
        "metric",
        "value",
        "ci_low",
        "ci_high",
    ])?;
    let mut rows = |source: &str, s: &CohortStats| -> Result<()> {
        for role in CollaboratorRole::ALL {
            for m in Metric::ALL {
                let ci = s.ci.get(&(m, role));
                w.write_record([
                    source.to_string(),
                    s.team_size.to_string(),
                    s.n_articles.to_string(),
                    role.as_str().to_string(),
                    m.as_str().to_string(),
                    to_f64(s.value(m, role)).to_string(),
                    opt(ci.map(|c| c.0)),
                    opt(ci.map(|c| c.1)),
                ])?;
            }
        }
        Ok(())
    };
    for s in empirical {
        rows("empirical", s)?;
    }
    for (model, arts) in nulls {
        if *model == NullModel::ErDensity {
            // the density null leaves isolated authors unclassified, so
            // team-structure ratios are not defined for it
            continue;
        }
        for (k, group) in cohorts(arts, config.min_team, config.max_team) {
            let s = CohortStats::compute(k, &group, None, config.min_cohort_articles)?;
            rows(model.as_str(), &s)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn write_figure_tasks(
    path: &Path,
    empirical: &[ArticleSummary],
    nulls: &BTreeMap<NullModel, Vec<ArticleSummary>>,
    common: &[String],
) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["source", "role", "task", "common_five", "count", "share"])?;
    for (source, arts) in sources(empirical, nulls) {
        for role in CollaboratorRole::ALL {
            let profile = TaskProfile::from_articles(arts, role);
            let total = profile.total();
            for (task, count) in profile.top_k(usize::MAX) {
                let share = if total == 0 {
                    0.0
                } else {
                    count as f64 / total as f64
                };
                w.write_record([
                    source,
                    role.as_str(),
                    task,
                    &common.iter().any(|c| c == task).to_string(),
                    &count.to_string(),
                    &share.to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
