//! Effective run configuration.
//!
//! Values come from, highest priority first: command-line flags, a
//! `key = value` config file, the `CONTRIBNET_SEED` environment variable
//! (seed only), built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use contribnet_core::metrics::{DEFAULT_MIN_COHORT_ARTICLES, DEFAULT_TOP_K};
use contribnet_core::nullmodel::{NullModel, DEFAULT_MAX_ATTEMPTS};
use contribnet_core::stats::KsMethod;
use serde::Serialize;

use crate::error::{Error, Result};

pub const SEED_ENV: &str = "CONTRIBNET_SEED";
pub const DEFAULT_SEED: u64 = 20_160_101;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub seed: u64,
    pub min_team: usize,
    pub max_team: usize,
    pub replicates: u32,
    pub models: Vec<NullModel>,
    pub bootstrap: u32,
    pub level: f64,
    pub max_attempts: u32,
    pub min_cohort_articles: usize,
    pub top_k: usize,
    pub ks_method: KsMethod,
    pub ack_fallback: bool,
    pub lexicon: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            min_team: 2,
            max_team: 20,
            replicates: 10,
            models: vec![NullModel::Cfm, NullModel::Erm, NullModel::ErDensity],
            bootstrap: 10_000,
            level: 0.95,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            min_cohort_articles: DEFAULT_MIN_COHORT_ARTICLES,
            top_k: DEFAULT_TOP_K,
            ks_method: KsMethod::Asymptotic,
            ack_fallback: false,
            lexicon: None,
        }
    }
}

/// One layer of optional settings; the config file and the flags are both
/// read into this shape.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub min_team: Option<usize>,
    pub max_team: Option<usize>,
    pub replicates: Option<u32>,
    pub models: Option<Vec<NullModel>>,
    pub bootstrap: Option<u32>,
    pub level: Option<f64>,
    pub max_attempts: Option<u32>,
    pub min_cohort_articles: Option<usize>,
    pub top_k: Option<usize>,
    pub ks_method: Option<KsMethod>,
    pub ack_fallback: Option<bool>,
    pub lexicon: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, c: &mut Config) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { c.$f = v.clone(); } )* };
        }
        take!(
            seed,
            min_team,
            max_team,
            replicates,
            models,
            bootstrap,
            level,
            max_attempts,
            min_cohort_articles,
            top_k,
            ks_method,
            ack_fallback
        );
        if self.lexicon.is_some() {
            c.lexicon = self.lexicon.clone();
        }
    }
}

pub fn parse_models(s: &str) -> std::result::Result<Vec<NullModel>, String> {
    let models: Vec<NullModel> = s
        .split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .map(|m| {
            NullModel::from_name(m)
                .ok_or_else(|| format!("unknown null model {m:?} (cfm, erm, erd)"))
        })
        .collect::<std::result::Result<_, _>>()?;
    if models.is_empty() {
        return Err("no null model named".into());
    }
    let mut dedup = models.clone();
    dedup.sort();
    dedup.dedup();
    if dedup.len() != models.len() {
        return Err("null model listed twice".into());
    }
    Ok(models)
}

pub fn parse_ks_method(s: &str) -> std::result::Result<KsMethod, String> {
    match s {
        "asymptotic" => Ok(KsMethod::Asymptotic),
        "exact" => Ok(KsMethod::Exact),
        other => Err(format!("unknown KS method {other:?} (asymptotic, exact)")),
    }
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("expected true or false, got {other:?}")),
    }
}

fn num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|_| format!("not a valid number: {s:?}"))
}

/// Read a `key = value` file. `#` starts a comment line.
pub fn parse_config_file(text: &str) -> Result<Overrides> {
    let mut o = Overrides::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| Error::Config(format!("config line {}: {m}", i + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err("expected key = value".into()))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        match key.as_str() {
            "seed" => o.seed = Some(num(value).map_err(err)?),
            "min_team" => o.min_team = Some(num(value).map_err(err)?),
            "max_team" => o.max_team = Some(num(value).map_err(err)?),
            "replicates" => o.replicates = Some(num(value).map_err(err)?),
            "models" | "model" => o.models = Some(parse_models(value).map_err(err)?),
            "bootstrap" => o.bootstrap = Some(num(value).map_err(err)?),
            "level" => o.level = Some(num(value).map_err(err)?),
            "max_attempts" => o.max_attempts = Some(num(value).map_err(err)?),
            "min_cohort_articles" => o.min_cohort_articles = Some(num(value).map_err(err)?),
            "top_k" => o.top_k = Some(num(value).map_err(err)?),
            "ks_method" => o.ks_method = Some(parse_ks_method(value).map_err(err)?),
            "ack_fallback" => o.ack_fallback = Some(parse_bool(value).map_err(err)?),
            "lexicon" => o.lexicon = Some(PathBuf::from(value)),
            other => return Err(err(format!("unknown key {other:?}"))),
        }
    }
    Ok(o)
}

impl Config {
    /// Layer defaults, env, file and flags, then validate.
    pub fn resolve(
        file: Option<&Path>,
        env_seed: Option<&str>,
        flags: &Overrides,
    ) -> Result<Config> {
        let mut c = Config::default();
        if let Some(s) = env_seed {
            c.seed = s.trim().parse().map_err(|_| {
                Error::Config(format!("{SEED_ENV}={s:?} is not an unsigned integer"))
            })?;
        }
        if let Some(path) = file {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let layer = parse_config_file(&text)?;
            layer.apply(&mut c);
            // a relative lexicon path in a config file is relative to the file
            if let (Some(lex), None) = (&layer.lexicon, &flags.lexicon) {
                if lex.is_relative() {
                    c.lexicon = Some(path.parent().unwrap_or(Path::new(".")).join(lex));
                }
            }
        }
        flags.apply(&mut c);
        c.validate()?;
        Ok(c)
    }

    /// Same as [`resolve`](Self::resolve), reading the seed default from the
    /// environment.
    pub fn from_env(file: Option<&Path>, flags: &Overrides) -> Result<Config> {
        let env = std::env::var(SEED_ENV).ok();
        Self::resolve(file, env.as_deref(), flags)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.min_team < 2 {
            return bad("min-team must be at least 2");
        }
        if self.max_team < self.min_team {
            return Err(Error::Config(format!(
                "max-team ({}) is below min-team ({})",
                self.max_team, self.min_team
            )));
        }
        if self.replicates < 1 {
            return bad("replicates must be at least 1");
        }
        if self.models.is_empty() {
            return bad("at least one null model is required");
        }
        let mut models = self.models.clone();
        models.sort();
        models.dedup();
        if models.len() != self.models.len() {
            return bad("null model listed twice");
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return bad("confidence level must lie strictly between 0 and 1");
        }
        if self.max_attempts < 1 {
            return bad("max-attempts must be at least 1");
        }
        if let Some(lex) = &self.lexicon {
            if !lex.is_file() {
                return Err(Error::Config(format!(
                    "lexicon {} does not exist",
                    lex.display()
                )));
            }
        }
        Ok(())
    }
}
