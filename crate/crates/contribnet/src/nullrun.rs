//! `nullmodel`: null replicates of every in-range article.

use std::collections::BTreeMap;
use std::path::Path;

use contribnet_core::graph::{build_graph, AuthorTaskGraph};
use contribnet_core::nullmodel::{CohortProfile, NullModelConfig, NullModelError};
use log::{debug, info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::records::{GraphRecord, JsonlWriter, NullRecord, ParsedCorpus};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NullRunSummary {
    pub model: String,
    pub articles: usize,
    pub replicates: u32,
    pub written: usize,
    /// Replicates skipped after `max_attempts` rejections.
    pub exhausted: usize,
    /// Articles whose shape no sampler can satisfy.
    pub infeasible: usize,
}

/// Empirical graphs within the team-size bounds, in corpus order.
pub fn in_range_graphs(
    corpus: &ParsedCorpus,
    min_team: usize,
    max_team: usize,
) -> Vec<AuthorTaskGraph> {
    corpus
        .statements
        .iter()
        .map(build_graph)
        .filter(|g| (min_team..=max_team).contains(&g.n_authors()))
        .collect()
}

/// Draw `config.replicates` samples for each in-range article.
pub fn run_nullmodel(
    corpus: &ParsedCorpus,
    config: &NullModelConfig,
    min_team: usize,
    max_team: usize,
    output: &Path,
) -> Result<NullRunSummary> {
    let all: Vec<AuthorTaskGraph> = corpus.statements.iter().map(build_graph).collect();
    let profiles: BTreeMap<usize, CohortProfile> = CohortProfile::from_graphs(&all)
        .into_iter()
        .map(|p| (p.team_size(), p))
        .collect();
    let graphs: Vec<&AuthorTaskGraph> = all
        .iter()
        .filter(|g| (min_team..=max_team).contains(&g.n_authors()))
        .collect();
    let fingerprint = corpus.lexicon_fingerprint.clone().unwrap_or_default();

    let jobs: Vec<(u32, &AuthorTaskGraph)> = (0..config.replicates)
        .flat_map(|r| graphs.iter().map(move |g| (r, *g)))
        .collect();
    info!(
        "{}: {} articles x {} replicates",
        config.model,
        graphs.len(),
        config.replicates
    );

    let results: Vec<(u32, &str, std::result::Result<NullRecord, NullModelError>)> = jobs
        .into_par_iter()
        .map(|(replicate, g)| {
            let mut rng = config.rng_for(replicate, g.article_id());
            let sample = config.model.sample(
                g,
                profiles.get(&g.n_authors()),
                &mut rng,
                config.max_attempts,
            );
            let rec = sample.map(|s| NullRecord {
                model: config.model,
                replicate,
                rejected_attempts: s.rejected_attempts,
                article: GraphRecord::from_graph(&s.graph, &fingerprint),
            });
            (replicate, g.article_id(), rec)
        })
        .collect();

    let mut summary = NullRunSummary {
        model: config.model.as_str().to_string(),
        articles: graphs.len(),
        replicates: config.replicates,
        written: 0,
        exhausted: 0,
        infeasible: 0,
    };
    let mut w = JsonlWriter::create(output)?;
    for (replicate, id, rec) in results {
        match rec {
            Ok(rec) => {
                w.write(&rec)?;
                summary.written += 1;
            }
            Err(NullModelError::SamplingExhausted { .. }) => {
                debug!("{id} replicate {replicate}: sampling exhausted");
                summary.exhausted += 1;
            }
            Err(NullModelError::InfeasibleEdgeCount { .. }) if replicate == 0 => {
                warn!("{id}: infeasible edge count for {}", config.model);
                summary.infeasible += 1;
            }
            Err(NullModelError::InfeasibleEdgeCount { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    w.finish()?;
    Ok(summary)
}
