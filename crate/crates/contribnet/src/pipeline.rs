//! `run`: ingest, parse, null models and analysis into one directory.

use std::fs;
use std::path::{Path, PathBuf};

use contribnet_core::nullmodel::{NullModel, NullModelConfig};
use log::{error, info};

use crate::analyze::{self, analyze};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::ingest::{build_corpus, expand_inputs, IngestOptions};
use crate::lexicon::LoadedLexicon;
use crate::manifest::{file_fingerprint, files_fingerprint, RunManifest};
use crate::nullrun::run_nullmodel;
use crate::parse::run_parse;
use crate::records::load_parsed;

pub const CORPUS: &str = "corpus.jsonl";
pub const PARSED: &str = "parsed.jsonl";
pub const PARTIAL_SUFFIX: &str = ".partial";

pub fn null_file(model: NullModel) -> String {
    format!("null_{}.jsonl", model.as_str())
}

/// Every file a complete run leaves besides the manifest.
fn expected_outputs(config: &Config, dump_graphs: bool) -> Vec<String> {
    let mut names = vec![CORPUS.to_string(), PARSED.to_string()];
    names.extend(config.models.iter().map(|&m| null_file(m)));
    names.extend(
        [
            analyze::ARTICLES,
            analyze::COHORT_STATS,
            analyze::DENSITY,
            analyze::TASK_PROFILES,
            analyze::HYPOTHESES,
            analyze::FIGURE_DENSITY,
            analyze::FIGURE_ROLES,
            analyze::FIGURE_TASKS,
        ]
        .map(String::from),
    );
    if dump_graphs {
        names.push(analyze::GRAPH_DIR.to_string());
    }
    names
}

/// Give whatever a failed run left behind the `.partial` suffix.
fn mark_partial(out_dir: &Path, names: &[String]) {
    for name in names {
        let path = out_dir.join(name);
        if path.exists() {
            let mut target = path.clone().into_os_string();
            target.push(PARTIAL_SUFFIX);
            let target = PathBuf::from(target);
            if target.is_dir() {
                let _ = fs::remove_dir_all(&target);
            }
            if let Err(e) = fs::rename(&path, &target) {
                error!("could not mark {} partial: {e}", path.display());
            }
        }
    }
}

fn stage<T>(
    name: &'static str,
    f: impl FnOnce() -> Result<T>,
) -> std::result::Result<T, (&'static str, Error)> {
    info!("stage {name}");
    f().map_err(|e| (name, e))
}

/// Run the whole pipeline. `config` must already be validated.
pub fn run_pipeline(
    inputs: &[PathBuf],
    out_dir: &Path,
    config: &Config,
    dump_graphs: bool,
) -> Result<RunManifest> {
    let lexicon = LoadedLexicon::load_or_default(config.lexicon.as_deref())?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut manifest = RunManifest::new("run", config);
    manifest
        .fingerprints
        .insert("lexicon".into(), lexicon.fingerprint.clone());
    manifest
        .fingerprints
        .insert("inputs".into(), files_fingerprint(&expand_inputs(inputs)));

    let result = stages(
        inputs,
        out_dir,
        config,
        dump_graphs,
        &lexicon,
        &mut manifest,
    );
    match result {
        Ok(()) => {
            manifest.succeed();
            manifest.write(out_dir)?;
            Ok(manifest)
        }
        Err((stage, e)) => {
            error!("stage {stage} failed: {e}");
            mark_partial(out_dir, &expected_outputs(config, dump_graphs));
            manifest.fail(stage, &e);
            manifest.write(out_dir)?;
            Err(Error::Stage {
                stage,
                source: Box::new(e),
            })
        }
    }
}

fn stages(
    inputs: &[PathBuf],
    out_dir: &Path,
    config: &Config,
    dump_graphs: bool,
    lexicon: &LoadedLexicon,
    manifest: &mut RunManifest,
) -> std::result::Result<(), (&'static str, Error)> {
    let corpus_path = out_dir.join(CORPUS);
    let summary = stage("ingest", || {
        build_corpus(
            inputs,
            &corpus_path,
            IngestOptions {
                ack_fallback: config.ack_fallback,
            },
        )
    })?;
    manifest.stage("ingest", &summary);
    manifest.outputs.push(corpus_path.clone());

    let parsed_path = out_dir.join(PARSED);
    let report = stage("parse", || {
        let fp = file_fingerprint(&corpus_path)?;
        manifest.fingerprints.insert("corpus".into(), fp);
        run_parse(&corpus_path, &parsed_path, lexicon)
    })?;
    manifest.stage("parse", &report);
    manifest.outputs.push(parsed_path.clone());

    let parsed = stage("nullmodel", || load_parsed(&parsed_path))?;
    let mut null_paths = Vec::new();
    let mut null_counts = Vec::new();
    for &model in &config.models {
        let path = out_dir.join(null_file(model));
        let counts = stage("nullmodel", || {
            let nc =
                NullModelConfig::new(model, config.replicates, config.seed, config.max_attempts)?;
            run_nullmodel(&parsed, &nc, config.min_team, config.max_team, &path)
        })?;
        null_counts.push(counts);
        manifest.outputs.push(path.clone());
        null_paths.push(path);
    }
    manifest.stage("nullmodel", &null_counts);

    let summary = stage("analyze", || {
        analyze(&parsed, &null_paths, lexicon, config, out_dir, dump_graphs)
    })?;
    manifest.stage("analyze", &summary);
    manifest.outputs.extend(summary.outputs.iter().cloned());
    Ok(())
}
