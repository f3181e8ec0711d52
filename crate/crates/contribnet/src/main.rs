use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use contribnet::analyze;
use contribnet::config::{parse_ks_method, parse_models, Config, Overrides};
use contribnet::error::{Error, Result};
use contribnet::ingest::{build_corpus, IngestOptions};
use contribnet::lexicon::LoadedLexicon;
use contribnet::manifest::{file_fingerprint, RunManifest};
use contribnet::nullrun::run_nullmodel;
use contribnet::parse::run_parse;
use contribnet::pipeline::run_pipeline;
use contribnet::records::load_parsed;
use contribnet_core::nullmodel::{NullModel, NullModelConfig};
use contribnet_core::stats::KsMethod;
use log::{info, warn};

/// Co-contributorship networks from author contribution statements.
#[derive(Parser)]
#[command(name = "contribnet", version, about)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// More logging; repeat for debug output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract contribution statements from article XML into corpus.jsonl.
    Ingest {
        /// Article files or directories of .xml / .nxml files.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        /// Use the acknowledgments when no contribution footnote exists.
        #[arg(long)]
        ack_fallback: bool,
    },
    /// Split statements into normalized author-task pairs.
    Parse {
        corpus: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Task lexicon (default: the bundled one).
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Sample null-model replicates of every in-range article.
    Nullmodel {
        parsed: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        settings: Settings,
    },
    /// Cohort statistics, task profiles and hypothesis tests.
    Analyze {
        parsed: PathBuf,
        /// Null replicate files from `nullmodel`.
        #[arg(long = "null", value_name = "FILE")]
        nulls: Vec<PathBuf>,
        /// Report directory.
        #[arg(short, long)]
        output: PathBuf,
        /// Also write one edge list per article under graphs/.
        #[arg(long)]
        dump_graphs: bool,
        #[command(flatten)]
        settings: Settings,
    },
    /// Everything from article XML to report in one directory.
    Run {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        dump_graphs: bool,
        #[arg(long)]
        ack_fallback: bool,
        #[command(flatten)]
        settings: Settings,
    },
}

#[derive(Args)]
struct Settings {
    /// key = value file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed (default: $CONTRIBNET_SEED, then a fixed value).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    min_team: Option<usize>,
    #[arg(long)]
    max_team: Option<usize>,
    #[arg(long)]
    replicates: Option<u32>,
    /// Comma-separated: cfm, erm, erd.
    #[arg(long, alias = "model", value_delimiter = ',', value_parser = parse_model)]
    models: Option<Vec<NullModel>>,
    /// Bootstrap iterations; 0 disables the intervals.
    #[arg(long)]
    bootstrap: Option<u32>,
    /// Confidence level of the bootstrap intervals.
    #[arg(long)]
    level: Option<f64>,
    /// Rejections tolerated per replicate.
    #[arg(long)]
    max_attempts: Option<u32>,
    /// Cohorts smaller than this are flagged low_n.
    #[arg(long)]
    min_cohort_articles: Option<usize>,
    #[arg(long)]
    top_k: Option<usize>,
    /// asymptotic or exact.
    #[arg(long, value_parser = parse_ks_method)]
    ks_method: Option<KsMethod>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

fn parse_model(s: &str) -> std::result::Result<NullModel, String> {
    Ok(parse_models(s)?[0])
}

impl Settings {
    fn resolve(self, ack_fallback: bool) -> Result<Config> {
        let flags = Overrides {
            seed: self.seed,
            min_team: self.min_team,
            max_team: self.max_team,
            replicates: self.replicates,
            models: self.models,
            bootstrap: self.bootstrap,
            level: self.level,
            max_attempts: self.max_attempts,
            min_cohort_articles: self.min_cohort_articles,
            top_k: self.top_k,
            ks_method: self.ks_method,
            ack_fallback: ack_fallback.then_some(true),
            lexicon: self.lexicon,
        };
        Config::from_env(self.config.as_deref(), &flags)
    }
}

fn print_json<T: serde::Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("summary serializes")
    );
}

/// Missing inputs are a usage problem, caught before any work starts.
fn require(paths: &[&Path]) -> Result<()> {
    match paths.iter().find(|p| !p.exists()) {
        Some(p) => Err(Error::Config(format!("{} does not exist", p.display()))),
        None => Ok(()),
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest {
            paths,
            output,
            ack_fallback,
        } => {
            let summary = build_corpus(&paths, &output, IngestOptions { ack_fallback })?;
            print_json(&summary);
        }
        Command::Parse {
            corpus,
            output,
            lexicon,
        } => {
            require(&[&corpus])?;
            if let Some(l) = &lexicon {
                require(&[l])?;
            }
            let lexicon = LoadedLexicon::load_or_default(lexicon.as_deref())?;
            let report = run_parse(&corpus, &output, &lexicon)?;
            if !report.reconciles() {
                warn!("parse counts do not reconcile: {report:?}");
            }
            print_json(&report);
        }
        Command::Nullmodel {
            parsed,
            output,
            settings,
        } => {
            let config = settings.resolve(false)?;
            require(&[&parsed])?;
            let corpus = load_parsed(&parsed)?;
            let mut summaries = Vec::new();
            // several models share one file; records carry their model
            let tmp: Vec<PathBuf> = config
                .models
                .iter()
                .map(|m| sibling(&output, &format!(".{}.tmp", m.as_str())))
                .collect();
            for (&model, path) in config.models.iter().zip(&tmp) {
                let nc = NullModelConfig::new(
                    model,
                    config.replicates,
                    config.seed,
                    config.max_attempts,
                )?;
                summaries.push(run_nullmodel(
                    &corpus,
                    &nc,
                    config.min_team,
                    config.max_team,
                    path,
                )?);
            }
            concat(&tmp, &output)?;
            print_json(&summaries);
        }
        Command::Analyze {
            parsed,
            nulls,
            output,
            dump_graphs,
            settings,
        } => {
            let config = settings.resolve(false)?;
            require(&[&parsed])?;
            require(&nulls.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
            let lexicon = LoadedLexicon::load_or_default(config.lexicon.as_deref())?;
            let corpus = load_parsed(&parsed)?;
            let mut manifest = RunManifest::new("analyze", &config);
            manifest
                .fingerprints
                .insert("lexicon".into(), lexicon.fingerprint.clone());
            manifest
                .fingerprints
                .insert("parsed".into(), file_fingerprint(&parsed)?);
            for (i, n) in nulls.iter().enumerate() {
                manifest
                    .fingerprints
                    .insert(format!("null.{i}"), file_fingerprint(n)?);
            }
            match analyze::analyze(&corpus, &nulls, &lexicon, &config, &output, dump_graphs) {
                Ok(summary) => {
                    manifest.stage("analyze", &summary);
                    manifest.outputs = summary.outputs.clone();
                    manifest.succeed();
                    manifest.write(&output)?;
                    print_json(&summary);
                }
                Err(e) => {
                    manifest.fail("analyze", &e);
                    if output.is_dir() {
                        manifest.write(&output)?;
                    }
                    return Err(e);
                }
            }
        }
        Command::Run {
            paths,
            output,
            dump_graphs,
            ack_fallback,
            settings,
        } => {
            let config = settings.resolve(ack_fallback)?;
            require(&paths.iter().map(PathBuf::as_path).collect::<Vec<_>>())?;
            let manifest = run_pipeline(&paths, &output, &config, dump_graphs)?;
            info!("wrote {}", output.display());
            print_json(&manifest.stages);
        }
    }
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn concat(parts: &[PathBuf], output: &Path) -> Result<()> {
    let mut out = std::fs::File::create(output).map_err(|e| Error::io(output, e))?;
    for p in parts {
        let mut f = std::fs::File::open(p).map_err(|e| Error::io(p, e))?;
        std::io::copy(&mut f, &mut out).map_err(|e| Error::io(output, e))?;
        std::fs::remove_file(p).map_err(|e| Error::io(p, e))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    if let Some(n) = cli.jobs {
        if n == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }

    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
