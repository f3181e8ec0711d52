//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS / FAIL line.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{fixture, SAMPLE_STATEMENT};
use contribnet::config::Config;
use contribnet::ingest::extract_statement;
use contribnet::pipeline::run_pipeline;
use contribnet_core::graph::{build_graph, normalized_density, AuthorTaskGraph};
use contribnet_core::hypothesis::{hypothesis_report, CohortKey, Hypothesis, ReportInput};
use contribnet_core::metrics::{cohorts, ArticleSummary, CohortStats, Fraction, TaskProfile};
use contribnet_core::nullmodel::{
    sample_cfm, sample_erm, stream_rng, CohortProfile, NullModel, NullModelError,
    DEFAULT_MAX_ATTEMPTS,
};
use contribnet_core::projection::{classify, project, CollaboratorRole};
use contribnet_core::statement::parse_statement;
use contribnet_core::stats::{bootstrap_ci, ks_two_sample, mean, KsMethod};
use contribnet_core::synth::{self, graph_from_rows, sample_article, Regime};
use rand::Rng;

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("sample statement author-task pairs", c1_sample_pairs),
        ("normalized density golden values", c2_density),
        ("projection and classification golden values", c3_projection),
        ("null-model invariants", c4_null_invariants),
        ("edge-count null uniformity", c5_uniformity),
        ("cohort statistic identities", c6_identities),
        ("KS statistic against brute force", c7_ks),
        ("bootstrap sanity", c8_bootstrap),
        ("division-of-labor regimes", c9_regimes),
        ("end-to-end determinism", c10_determinism),
    ];
    // keep panics inside a criterion from printing a backtrace banner
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}; {secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn c1_sample_pairs() -> Result<String, String> {
    let xml = fs::read_to_string(fixture("sample_article.xml")).map_err(|e| e.to_string())?;
    let statement = extract_statement(&xml)
        .map_err(|e| e.to_string())?
        .ok_or("no statement")?;
    ensure!(statement == SAMPLE_STATEMENT, "extracted {statement:?}");
    let parsed = parse_statement(&statement).map_err(|e| e.to_string())?;
    let expected: [(&str, &[&str]); 5] = [
        (
            "Conceived and designed the experiments",
            &["EG", "ES", "JD"],
        ),
        ("Performed the experiments", &["ES", "JD", "MH", "JP", "MS"]),
        ("Analyzed the data", &["EG", "ES", "FC", "JD", "JP", "MS"]),
        (
            "Contributed reagents/materials/analysis tools",
            &["ES", "JD", "MH", "JP", "MS"],
        ),
        ("Wrote the paper", &["EG", "ES"]),
    ];
    ensure!(parsed.pairs.len() == 5, "{} pairs", parsed.pairs.len());
    ensure!(parsed.issues.is_empty(), "issues {:?}", parsed.issues);
    for (pair, (task, authors)) in parsed.pairs.iter().zip(expected) {
        ensure!(pair.task == task, "task {:?} != {task:?}", pair.task);
        ensure!(
            pair.authors == authors,
            "{task}: authors {:?}",
            pair.authors
        );
    }
    Ok("5 rows match".into())
}

fn c2_density() -> Result<String, String> {
    let g = build_graph(&sample_article());
    ensure!(
        (g.n_authors(), g.n_tasks(), g.n_edges()) == (7, 5, 21),
        "counts {:?}",
        (g.n_authors(), g.n_tasks(), g.n_edges())
    );
    ensure!(
        normalized_density(&g) == 0.5,
        "density {}",
        normalized_density(&g)
    );
    let one_author = graph_from_rows("a", &[("t1", "A"), ("t2", "A"), ("t3", "A"), ("t4", "A")]);
    ensure!(
        (
            one_author.n_authors(),
            one_author.n_tasks(),
            one_author.n_edges()
        ) == (1, 4, 4),
        "fixture shape"
    );
    ensure!(
        normalized_density(&one_author) == 1.0,
        "N_a=1 gives {}",
        normalized_density(&one_author)
    );
    let one_task = graph_from_rows("b", &[("t1", "A B C")]);
    ensure!(
        normalized_density(&one_task) == 1.0,
        "N_t=1 gives {}",
        normalized_density(&one_task)
    );
    Ok("7/5/21 -> 0.5, degenerate -> 1".into())
}

fn c3_projection() -> Result<String, String> {
    let net = project(&build_graph(&sample_article()));
    ensure!(
        net.pair_weight("EG", "ES") == 3,
        "EG-ES {}",
        net.pair_weight("EG", "ES")
    );
    ensure!(
        net.pair_weight("ES", "JD") == 4,
        "ES-JD {}",
        net.pair_weight("ES", "JD")
    );
    ensure!(
        net.self_weights().is_empty(),
        "self weights {:?}",
        net.self_weights()
    );
    let roles = classify(&net).map_err(|e| e.to_string())?;
    ensure!(
        roles.len() == 7 && roles.iter().all(|&r| r == CollaboratorRole::TeamPlayer),
        "roles {roles:?}"
    );

    let g = graph_from_rows("fx", &[("t1", "A"), ("t2", "A"), ("t3", "B C")]);
    let net = project(&g);
    let roles = classify(&net).map_err(|e| e.to_string())?;
    let by_name: BTreeMap<&str, CollaboratorRole> = g
        .authors()
        .iter()
        .map(String::as_str)
        .zip(roles.iter().copied())
        .collect();
    ensure!(
        by_name["A"] == CollaboratorRole::Specialist,
        "A is {}",
        by_name["A"]
    );
    ensure!(
        net.self_weight("A") == 2,
        "A self weight {}",
        net.self_weight("A")
    );
    ensure!(
        by_name["B"] == CollaboratorRole::TeamPlayer
            && by_name["C"] == CollaboratorRole::TeamPlayer,
        "{by_name:?}"
    );
    Ok("sample article and three-task fixture".into())
}

fn degree_multisets(g: &AuthorTaskGraph) -> (Vec<usize>, Vec<usize>) {
    let (mut a, mut t) = g.degrees();
    a.sort_unstable();
    t.sort_unstable();
    (a, t)
}

fn c4_null_invariants() -> Result<String, String> {
    let start = Instant::now();
    let g = build_graph(&sample_article());
    let (author_deg, task_deg) = g.degrees();
    ensure!(
        author_deg == [3, 5, 4, 2, 3, 3, 1],
        "template author degrees {author_deg:?}"
    );
    ensure!(
        task_deg == [3, 5, 6, 5, 2],
        "template task degrees {task_deg:?}"
    );
    let expected = degree_multisets(&g);

    let mut accepted = 0;
    let mut exhausted = 0;
    for i in 0..1000u64 {
        let mut rng = stream_rng(7, i, "acceptance-cfm");
        match sample_cfm(&g, &mut rng, DEFAULT_MAX_ATTEMPTS) {
            Ok(s) => {
                accepted += 1;
                let edges = s.graph.edges();
                let distinct: BTreeSet<_> = edges.iter().collect();
                ensure!(
                    distinct.len() == edges.len() && edges.len() == 21,
                    "sample {i} has a duplicate edge"
                );
                ensure!(
                    s.graph.degrees() == (author_deg.clone(), task_deg.clone()),
                    "sample {i} degrees changed"
                );
                ensure!(
                    degree_multisets(&s.graph) == expected,
                    "sample {i} multisets changed"
                );
            }
            Err(NullModelError::SamplingExhausted { .. }) => exhausted += 1,
            Err(e) => return Err(e.to_string()),
        }
    }
    ensure!(accepted > 0, "no CFM sample accepted");

    let n = 10_000u64;
    let mut diagonal = 0u64;
    for i in 0..n {
        let mut rng = stream_rng(11, i, "acceptance-erm");
        let s = sample_erm(2, 2, 2, &mut rng, DEFAULT_MAX_ATTEMPTS).map_err(|e| e.to_string())?;
        let e = s.graph.edges();
        if e == [(0, 0), (1, 1)] {
            diagonal += 1;
        } else {
            ensure!(
                e == [(0, 1), (1, 0)],
                "draw {i} is not a perfect matching: {e:?}"
            );
        }
    }
    let share = diagonal as f64 / n as f64;
    ensure!((share - 0.5).abs() <= 0.015, "matching frequency {share}");

    for seed in [1u64, 2, 3] {
        let mut rng = stream_rng(seed, 0, "acceptance-infeasible");
        match sample_erm(3, 5, 4, &mut rng, DEFAULT_MAX_ATTEMPTS) {
            Err(NullModelError::InfeasibleEdgeCount { .. }) => {}
            other => return Err(format!("(3,5,4) gave {other:?}")),
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!(
        "cfm {accepted} accepted / {exhausted} exhausted, erm matching share {share:.4}"
    ))
}

/// Every edge set on `na` x `nt` cells with `k` edges and no isolated node.
fn feasible_graphs(na: usize, nt: usize, k: usize) -> Vec<Vec<(usize, usize)>> {
    let cells: Vec<(usize, usize)> = (0..na).flat_map(|a| (0..nt).map(move |t| (a, t))).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << cells.len()) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let edges: Vec<(usize, usize)> = cells
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &c)| c)
            .collect();
        let authors_ok = (0..na).all(|a| edges.iter().any(|e| e.0 == a));
        let tasks_ok = (0..nt).all(|t| edges.iter().any(|e| e.1 == t));
        if authors_ok && tasks_ok {
            out.push(edges);
        }
    }
    out
}

fn c5_uniformity() -> Result<String, String> {
    let draws = 10_000u64;
    let mut shapes = 0;
    let mut worst = 0.0f64;
    for na in 1..=3 {
        for nt in 1..=3 {
            for k in na.max(nt)..=na * nt {
                let all = feasible_graphs(na, nt, k);
                let index: BTreeMap<&Vec<(usize, usize)>, usize> =
                    all.iter().enumerate().map(|(i, g)| (g, i)).collect();
                let mut counts = vec![0u64; all.len()];
                let label = format!("uniform-{na}-{nt}-{k}");
                for i in 0..draws {
                    let mut rng = stream_rng(5, i, &label);
                    let s = sample_erm(na, nt, k, &mut rng, DEFAULT_MAX_ATTEMPTS)
                        .map_err(|e| e.to_string())?;
                    let at = index
                        .get(&s.graph.edges().to_vec())
                        .ok_or(format!("{label}: infeasible draw"))?;
                    counts[*at] += 1;
                }
                let p = 1.0 / all.len() as f64;
                let expected = draws as f64 * p;
                let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
                for (g, &c) in all.iter().zip(&counts) {
                    let dev = (c as f64 - expected).abs();
                    if sigma > 0.0 {
                        worst = worst.max(dev / sigma);
                    }
                    ensure!(
                        dev <= 4.0 * sigma,
                        "{label}: graph {g:?} drawn {c} times, expected {expected:.1} +- {:.1}",
                        4.0 * sigma
                    );
                }
                shapes += 1;
            }
        }
    }
    Ok(format!(
        "{shapes} (N_a, N_t, k) cases, worst deviation {worst:.2} sigma"
    ))
}

fn c6_identities() -> Result<String, String> {
    let corpus = synth::random_corpus(1000, 2, 20, 17);
    let summaries: Vec<ArticleSummary> = corpus
        .iter()
        .map(|s| ArticleSummary::from_graph(&build_graph(s)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let groups = cohorts(&summaries, 2, 20);
    ensure!(groups.len() == 19, "{} cohorts", groups.len());
    for (&k, arts) in &groups {
        let s = CohortStats::compute(k, arts, None, 5).map_err(|e| e.to_string())?;
        let total: Fraction = s.rc.iter().copied().sum();
        ensure!(
            total == Fraction::from_integer(1),
            "k={k}: sum of rc = {total}"
        );
        for role in CollaboratorRole::ALL {
            let i = role.index();
            ensure!(
                s.ac[i] == s.rc[i] * Fraction::from_integer(k as u64),
                "k={k} {role}: ac != rc*k"
            );
            ensure!(
                (s.pr[i] == Fraction::from_integer(0)) == (s.rc[i] == Fraction::from_integer(0)),
                "k={k} {role}: pr/rc zero mismatch"
            );
        }
    }
    let profile_total: u64 = CollaboratorRole::ALL
        .into_iter()
        .map(|r| TaskProfile::from_articles(&summaries, r).total())
        .sum();
    let edges: u64 = summaries.iter().map(|a| a.n_edges as u64).sum();
    ensure!(
        profile_total == edges,
        "profiles {profile_total} != edges {edges}"
    );
    Ok(format!(
        "19 cohorts exact, {edges} participations conserved"
    ))
}

/// Direct O(n^2) supremum over the pooled sample.
fn brute_force_d(x: &[f64], y: &[f64]) -> f64 {
    let cdf = |s: &[f64], t: f64| s.iter().filter(|&&v| v <= t).count() as f64 / s.len() as f64;
    x.iter()
        .chain(y)
        .map(|&t| (cdf(x, t) - cdf(y, t)).abs())
        .fold(0.0, f64::max)
}

fn c7_ks() -> Result<String, String> {
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let mut rng = stream_rng(3, i, "acceptance-ks");
        let n1 = rng.random_range(1..=200);
        let n2 = rng.random_range(1..=200);
        let shift: f64 = rng.random_range(-1.0..1.0);
        // half the pairs use a coarse grid so ties are common
        let coarse = i % 2 == 0;
        let mut draw = |offset: f64| {
            let v: f64 = rng.random_range(0.0..10.0) + offset;
            if coarse {
                v.round()
            } else {
                v
            }
        };
        let x: Vec<f64> = (0..n1).map(|_| draw(0.0)).collect();
        let y: Vec<f64> = (0..n2).map(|_| draw(shift)).collect();
        let d = ks_two_sample(&x, &y).map_err(|e| e.to_string())?.statistic;
        let oracle = brute_force_d(&x, &y);
        worst = worst.max((d - oracle).abs());
        ensure!(
            (d - oracle).abs() <= 1e-12,
            "pair {i}: D {d} vs brute force {oracle}"
        );
    }
    let x: Vec<f64> = (0..50).map(|v| v as f64 * 0.37).collect();
    let same = ks_two_sample(&x, &x).map_err(|e| e.to_string())?;
    ensure!(
        same.statistic == 0.0 && same.p_value == 1.0,
        "identical samples gave {same:?}"
    );
    Ok(format!("100 pairs, max |error| {worst:e}"))
}

fn c8_bootstrap() -> Result<String, String> {
    let constant = vec![0.7; 40];
    let (lo, hi) = bootstrap_ci(&constant, mean, 10_000, 0.95, 1).map_err(|e| e.to_string())?;
    ensure!(lo == hi && lo == 0.7, "constant data interval ({lo}, {hi})");

    let bernoulli: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
    let a = bootstrap_ci(&bernoulli, mean, 10_000, 0.95, 2024).map_err(|e| e.to_string())?;
    let b = bootstrap_ci(&bernoulli, mean, 10_000, 0.95, 99_991).map_err(|e| e.to_string())?;
    ensure!(
        (a.0 - b.0).abs() <= 0.03 && (a.1 - b.1).abs() <= 0.03,
        "seeds disagree: {a:?} vs {b:?}"
    );
    ensure!(
        (a.0 - 0.40).abs() <= 0.03 && (a.1 - 0.60).abs() <= 0.03,
        "interval {a:?} far from (0.40, 0.60)"
    );
    Ok(format!(
        "({:.3}, {:.3}) vs ({:.3}, {:.3})",
        a.0, a.1, b.0, b.1
    ))
}

fn summaries_of(
    statements: &[contribnet_core::statement::ParsedStatement],
) -> Result<Vec<ArticleSummary>, String> {
    statements
        .iter()
        .map(|s| ArticleSummary::from_graph(&build_graph(s)).map_err(|e| e.to_string()))
        .collect()
}

fn c9_regimes() -> Result<String, String> {
    let start = Instant::now();
    for k in [2usize, 6, 15] {
        for (regime, role) in [
            (Regime::AllSolo, CollaboratorRole::Specialist),
            (Regime::AllShared, CollaboratorRole::TeamPlayer),
        ] {
            let arts = summaries_of(&synth::regime_corpus(regime, k, 60, 8))?;
            let authors: u32 = arts.iter().map(|a| a.roles.total()).sum();
            let of_role: u32 = arts.iter().map(|a| a.roles.get(role)).sum();
            ensure!(
                authors == of_role && authors == (60 * k) as u32,
                "{regime:?} k={k}: {of_role}/{authors} {role}"
            );
        }
    }

    let team_sizes = [4usize, 8, 12];
    let mut statements = Vec::new();
    for &k in &team_sizes {
        statements.extend(synth::mixed_corpus(k, 60, 21));
    }
    let empirical = summaries_of(&statements)?;
    for role in CollaboratorRole::ALL {
        ensure!(
            empirical.iter().all(|a| a.roles.contains(role)),
            "mixed regime article without a {role}"
        );
    }

    let graphs: Vec<AuthorTaskGraph> = statements.iter().map(build_graph).collect();
    let profiles: BTreeMap<usize, CohortProfile> = CohortProfile::from_graphs(&graphs)
        .into_iter()
        .map(|p| (p.team_size(), p))
        .collect();
    let mut erd = Vec::new();
    for replicate in 0..5u64 {
        for g in &graphs {
            let mut rng = stream_rng(13, replicate, g.article_id());
            let s = NullModel::ErDensity
                .sample(
                    g,
                    profiles.get(&g.n_authors()),
                    &mut rng,
                    DEFAULT_MAX_ATTEMPTS,
                )
                .map_err(|e| e.to_string())?;
            erd.push(ArticleSummary::from_graph_lenient(&s.graph));
        }
    }
    let nulls = BTreeMap::from([(NullModel::ErDensity, erd)]);
    let common: Vec<String> = contribnet_core::statement::DEFAULT_COMMON_FIVE
        .iter()
        .map(|s| s.to_string())
        .collect();
    let report = hypothesis_report(&ReportInput {
        empirical: &empirical,
        nulls: &nulls,
        common_five: &common,
        min_team: 2,
        max_team: 20,
        ks_method: KsMethod::Asymptotic,
    });

    let mut worst_p = 0.0f64;
    for &k in &team_sizes {
        let entry = report
            .entry(Hypothesis::H01, CohortKey::TeamSize(k))
            .ok_or(format!("no H01 entry for k={k}"))?;
        ensure!(
            entry.n_articles >= 50,
            "k={k}: {} articles",
            entry.n_articles
        );
        let test = entry
            .tests
            .iter()
            .find(|t| t.model == NullModel::ErDensity)
            .ok_or("no erd test")?;
        let ks = test
            .outcome
            .ks()
            .ok_or(format!("k={k}: {:?}", test.outcome))?;
        let x: Vec<f64> = empirical
            .iter()
            .filter(|a| a.team_size == k)
            .map(|a| a.density)
            .collect();
        let y: Vec<f64> = nulls[&NullModel::ErDensity]
            .iter()
            .filter(|a| a.team_size == k)
            .map(|a| a.density)
            .collect();
        let direct = ks_two_sample(&x, &y).map_err(|e| e.to_string())?;
        ensure!(
            ks.statistic == direct.statistic && ks.p_value == direct.p_value,
            "k={k}: report {ks:?} vs direct {direct:?}"
        );
        ensure!(
            ks.p_value < 0.001,
            "k={k}: H01 not rejected, p = {}",
            ks.p_value
        );
        worst_p = worst_p.max(ks.p_value);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    Ok(format!(
        "solo/shared pure, mixed has all roles, H01 max p {worst_p:.2e}"
    ))
}

fn write_synthetic_xml(dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| e.to_string())?;
    for (i, s) in synth::random_corpus(80, 2, 8, 5).iter().enumerate() {
        let xml = format!(
            "<article><front><journal-meta><journal-title>Synthetic</journal-title></journal-meta>\
             <article-meta><article-id pub-id-type=\"doi\">10.0/synthetic.{i}</article-id>\
             <pub-date><year>2014</year></pub-date><author-notes><fn fn-type=\"con\"><p>{}</p></fn>\
             </author-notes></article-meta></front></article>",
            synth::render_statement(s)
        );
        fs::write(dir.join(format!("a{i:03}.xml")), xml).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn c10_determinism() -> Result<String, String> {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let xml = tmp.path().join("xml");
    write_synthetic_xml(&xml)?;
    let inputs: Vec<PathBuf> = vec![xml, fixture("sample_article.xml")];
    let config = Config {
        seed: 42,
        replicates: 3,
        bootstrap: 500,
        ..Config::default()
    };
    config.validate().map_err(|e| e.to_string())?;

    let mut outputs = Vec::new();
    for run in ["first", "second"] {
        let out = tmp.path().join(run);
        run_pipeline(&inputs, &out, &config, false).map_err(|e| e.to_string())?;
        outputs.push(out);
    }
    let mut compared = 0;
    let mut names: Vec<String> = fs::read_dir(&outputs[0])
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv") || n == "hypotheses.json")
        .collect();
    names.sort();
    ensure!(names.len() == 7, "analytical files {names:?}");
    for name in &names {
        let a = fs::read(outputs[0].join(name)).map_err(|e| e.to_string())?;
        let b = fs::read(outputs[1].join(name)).map_err(|e| e.to_string())?;
        ensure!(a == b, "{name} differs between runs");
        compared += 1;
    }
    Ok(format!("{compared} files byte-identical"))
}
