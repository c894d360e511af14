//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Criteria 6, 7, 8 and 12 share one desk-scale
//! `synth` + `all` run through the binary.

use std::collections::BTreeMap;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rm_metrics_core::atypicality::{
    compute_atypicality, null_model_sample, observed_pair_counts, pair_zscores, CitationNetwork,
    JournalPairKey, NullModelConfig, PairCounts,
};
use rm_metrics_core::corpus::{Corpus, CorpusBuilder, RawAuthorship, RawFieldScore, RawWork};
use rm_metrics_core::disruption::{
    disruption, disruption_all, disruption_by_key, top_percentile_flags, DisruptionOptions, DisruptionScore,
};
use rm_metrics_core::ids::{FieldId, PaperId, VenueId};
use rm_metrics_core::inference::{fit_logistic, log_likelihood, odds_ratios, score, FitOptions};
use rm_metrics_core::style::{classify_style, s_score, windowed_s_scores, Style};
use rm_metrics_core::synth::{generate_logit_design, LogitDesignSpec};
use rm_metrics_core::Error;
use serde_json::Value;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const DESK_SEED: &str = "7";

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "disruption oracle equivalence", c1_oracle),
        (2, "disruption extremes and undefined", c2_extremes),
        (3, "null-model conservation and determinism", c3_conservation),
        (4, "atypicality sign behaviour", c4_sign),
        (5, "S-score exemplars and window oracle", c5_style),
        (6, "stability planted recovery", c6_stability),
        (7, "fox and team trend recovery", c7_trends),
        (8, "specialist decline and CI coverage", c8_decline),
        (9, "printed odds ratios", c9_odds),
        (10, "IRLS recovery", c10_irls),
        (11, "percentile flagging", c11_flags),
        (12, "end-to-end determinism and runtime", c12_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, check) in criteria {
        let t = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2}: PASS  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2}: FAIL  {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

// ---------------------------------------------------------------- fixtures

fn work(id: &str, year: i32, venue: Option<&str>, author: &str, refs: &[String]) -> RawWork {
    RawWork {
        id: id.to_string(),
        publication_year: year,
        venue: venue.map(String::from),
        authorships: vec![RawAuthorship {
            author_id: author.to_string(),
            position: 0,
        }],
        referenced_works: refs.to_vec(),
        fields: vec![RawFieldScore {
            id: "F0".into(),
            score: 0.9,
            level: None,
        }],
    }
}

fn build(works: Vec<RawWork>) -> Corpus {
    let mut b = CorpusBuilder::new("acceptance");
    for (i, w) in works.into_iter().enumerate() {
        b.push(i + 1, w);
    }
    b.build().expect("fixture builds")
}

fn refs(ids: &[&str]) -> Vec<String> {
    ids.iter().map(|s| s.to_string()).collect()
}

/// Citation DAG in which paper `i` cites earlier papers of the same or an
/// earlier year.
fn random_corpus(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Corpus {
    let mut years: Vec<i32> = (0..n).map(|_| rng.gen_range(2000..2008)).collect();
    years.sort_unstable();
    let works = (0..n)
        .map(|i| {
            let r: Vec<String> = (0..i)
                .filter(|&j| years[j] <= years[i] && rng.gen_bool(density))
                .map(|j| format!("P{j}"))
                .collect();
            let venue = format!("V{}", rng.gen_range(0..4));
            work(&format!("P{i}"), years[i], Some(&venue), &format!("A{i}"), &r)
        })
        .collect();
    build(works)
}

/// Exhaustive count over every paper for one focal paper.
fn naive_counts(corpus: &Corpus, focal: PaperId, same_year: bool) -> (u32, u32, u32) {
    let f = corpus.paper(focal);
    let (mut ni, mut nj, mut nk) = (0, 0, 0);
    for p in corpus.papers() {
        if p.id == focal || p.year < f.year || (!same_year && p.year == f.year) {
            continue;
        }
        let cites_focal = p.references.contains(&focal);
        let cites_ref = f.references.iter().any(|r| p.references.contains(r));
        match (cites_focal, cites_ref) {
            (true, false) => ni += 1,
            (true, true) => nj += 1,
            (false, true) => nk += 1,
            (false, false) => {}
        }
    }
    (ni, nj, nk)
}

// ---------------------------------------------------------------- criteria

fn c1_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let corpora: Vec<Corpus> = (0..50)
        .map(|i| random_corpus(&mut rng, 20 + (i * 37) % 181, [0.02, 0.05, 0.1, 0.3][i % 4]))
        .collect();
    let t = Instant::now();
    let (mut checked, mut defined) = (0usize, 0usize);
    for corpus in &corpora {
        for same_year in [true, false] {
            let opts = DisruptionOptions {
                include_same_year: same_year,
            };
            let scores: Vec<DisruptionScore<Ratio<i64>>> = disruption_all(corpus, opts);
            for p in corpus.papers() {
                let (ni, nj, nk) = naive_counts(corpus, p.id, same_year);
                let s = &scores[p.id.index()];
                ensure!((s.n_i, s.n_j, s.n_k) == (ni, nj, nk), "{}: counts {:?}", p.key, (s.n_i, s.n_j, s.n_k));
                ensure!(s.defined == (ni + nj + nk > 0), "{}: defined flag", p.key);
                if s.defined {
                    let want = Ratio::new(ni as i64 - nj as i64, (ni + nj + nk) as i64);
                    ensure!(s.d == want, "{}: d {} vs oracle {}", p.key, s.d, want);
                    defined += 1;
                }
                checked += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    ensure!(secs < 5.0, "took {secs:.2}s");
    Ok(format!("{checked} scores ({defined} defined) exact in {secs:.2}s"))
}

fn c2_extremes() -> Outcome {
    // R <- F; C1 cites F only; C2 cites F and R; C3 cites R only
    let disruptive = build(vec![
        work("R", 2000, None, "a", &[]),
        work("F", 2001, None, "b", &refs(&["R"])),
        work("C1", 2002, None, "c", &refs(&["F"])),
    ]);
    let consolidating = build(vec![
        work("R", 2000, None, "a", &[]),
        work("F", 2001, None, "b", &refs(&["R"])),
        work("C2", 2002, None, "c", &refs(&["F", "R"])),
    ]);
    let opts = DisruptionOptions::default();
    let plus: DisruptionScore<f64> = disruption_by_key(&disruptive, "F", opts).map_err(|e| e.to_string())?;
    let minus: DisruptionScore<f64> = disruption_by_key(&consolidating, "F", opts).map_err(|e| e.to_string())?;
    ensure!(plus.defined && plus.d == 1.0 && (plus.n_i, plus.n_j, plus.n_k) == (1, 0, 0), "{plus:?}");
    ensure!(minus.defined && minus.d == -1.0 && (minus.n_i, minus.n_j, minus.n_k) == (0, 1, 0), "{minus:?}");
    let exact: DisruptionScore<Ratio<i64>> = disruption_by_key(&disruptive, "F", opts).unwrap();
    ensure!(exact.d == Ratio::from_integer(1), "exact {}", exact.d);

    // C1 has no references and no citers, so nothing is counted
    let lonely: DisruptionScore<f64> = disruption_by_key(&disruptive, "C1", opts).unwrap();
    ensure!(!lonely.defined && lonely.n_i + lonely.n_j + lonely.n_k == 0, "{lonely:?}");
    let unknown = disruption::<f64>(&disruptive, PaperId(99), opts);
    ensure!(matches!(unknown, Err(Error::UnknownPaper(_))), "{unknown:?}");
    let none = vec![DisruptionScore::<f64>::from_counts(PaperId(0), 0, 0, 0)];
    ensure!(matches!(top_percentile_flags(&none, 5.0), Err(Error::NoDefinedScores)), "all undefined accepted");
    Ok("d = 1 and d = -1 exact; undefined flagged; unknown focal rejected".into())
}

fn thousand_edge_network(seed: u64) -> CitationNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_cited = 300;
    let cited_year: Vec<i32> = (0..n_cited).map(|_| rng.gen_range(1990..2000)).collect();
    let cited_venue: Vec<VenueId> = (0..n_cited).map(|_| VenueId(rng.gen_range(0..25))).collect();
    let mut lists: Vec<Vec<u32>> = Vec::new();
    let mut edges = 0;
    while edges < 1000 {
        let k = rng.gen_range(1..=12.min(1000 - edges));
        let mut list: Vec<u32> = Vec::new();
        while list.len() < k {
            let r = rng.gen_range(0..n_cited as u32);
            if !list.contains(&r) {
                list.push(r);
            }
        }
        edges += k;
        lists.push(list);
    }
    CitationNetwork::new(2005, lists, cited_year, cited_venue)
}

fn c3_conservation() -> Outcome {
    let base = thousand_edge_network(1);
    ensure!(base.n_edges() == 1000, "{} edges", base.n_edges());
    let (out, inn, years) = (base.out_degrees(), base.in_degrees(), base.cited_year_profile());
    let mut accepted = 0u64;
    for sample in 0..10u64 {
        let mut net = base.clone();
        let diag = net.randomize(&mut ChaCha8Rng::seed_from_u64(sample), 10);
        ensure!(net.out_degrees() == out, "sample {sample}: reference counts changed");
        ensure!(net.in_degrees() == inn, "sample {sample}: in-degrees changed");
        ensure!(net.cited_year_profile() == years, "sample {sample}: year strata changed");
        accepted += diag.values().map(|s| s.accepted).sum::<u64>();
    }
    let run = |seed| {
        let mut net = thousand_edge_network(2);
        net.randomize(&mut ChaCha8Rng::seed_from_u64(seed), 10);
        net.pair_counts()
    };
    ensure!(run(9) == run(9), "same seed gave different pair counts");
    ensure!(run(9) != run(10), "different seeds gave identical pair counts");
    Ok(format!("10 samples conserve degrees and strata, {accepted} swaps accepted; seeds reproduce"))
}

fn c4_sign() -> Outcome {
    let mut works = Vec::new();
    for v in ["A", "B", "X", "Y"] {
        for i in 0..20 {
            works.push(work(&format!("{v}{i}"), 2000, Some(v), "old", &[]));
        }
    }
    let mut n = 0;
    let mut cite = |a: String, b: String, works: &mut Vec<RawWork>| {
        works.push(work(&format!("C{n}"), 2010, Some("Z"), "new", &[a, b]));
        n += 1;
    };
    for i in 0..40 {
        cite(format!("A{}", i % 20), format!("B{}", (i * 7) % 20), &mut works);
    }
    for i in 0..30 {
        cite(format!("X{}", i % 20), format!("X{}", (i + 5) % 20), &mut works);
        cite(format!("Y{}", i % 20), format!("Y{}", (i + 5) % 20), &mut works);
    }
    cite("X3".into(), "Y4".into(), &mut works);
    let corpus = build(works);

    let venue = |key: &str| VenueId(corpus.venues().iter().position(|v| v == key).unwrap() as u32);
    let observed = observed_pair_counts(&corpus, 2010);
    let samples: Vec<PairCounts> = (0..10).map(|i| null_model_sample(&corpus, 2010, 100 + i, 10).0).collect();
    let table = pair_zscores::<f64>(&observed, &samples);
    let rare = table[&JournalPairKey::new(venue("X"), venue("Y"), 2010)].z.ok_or("X-Y z undefined")?;
    let conventional = table[&JournalPairKey::new(venue("A"), venue("B"), 2010)].z.ok_or("A-B z undefined")?;
    ensure!(rare < 0.0, "z(X,Y) = {rare}");
    ensure!(conventional > 0.0, "z(A,B) = {conventional}");

    let cfg = NullModelConfig {
        seed: 5,
        samples: 10,
        ..NullModelConfig::default()
    };
    let run = compute_atypicality::<f64>(&corpus, &cfg);
    let focal = &run.scores[corpus.paper_by_key(&format!("C{}", n - 1)).unwrap().index()];
    ensure!(focal.defined && focal.a > 0.0, "focal a = {}", focal.a);
    Ok(format!("z(rare) = {rare:.3}, z(conventional) = {conventional:.3}, a = {:.3}", focal.a))
}

fn c5_style() -> Outcome {
    ensure!(classify_style(0.5f64).map_err(|e| e.to_string())? == Style::Hedgehog, "S = 0.5 not hedgehog");
    ensure!(classify_style(0.1f64).map_err(|e| e.to_string())? == Style::Fox, "S = 0.1 not fox");
    let half: Vec<FieldId> = [0, 0, 0, 0, 0, 1, 2, 3, 4, 5].into_iter().map(FieldId).collect();
    let spread: Vec<FieldId> = (0..10).map(FieldId).collect();
    ensure!(s_score::<Ratio<i64>>(&half).unwrap() == Ratio::new(1, 2), "S of half career");
    ensure!(s_score::<Ratio<i64>>(&spread).unwrap() == Ratio::new(1, 10), "S of spread career");

    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut windows = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(10..60);
        let pool = rng.gen_range(1..8);
        let seq: Vec<FieldId> = (0..n).map(|_| FieldId(rng.gen_range(0..pool))).collect();
        let got = windowed_s_scores::<Ratio<i64>>(&seq, 10).map_err(|e| e.to_string())?;
        ensure!(got.len() == n - 9, "window count for length {n}");
        for (i, v) in got.iter().enumerate() {
            let win = &seq[i..i + 10];
            let top = win.iter().map(|f| win.iter().filter(|g| *g == f).count()).max().unwrap();
            ensure!(*v == Ratio::new(top as i64, 10), "window {i} of {seq:?}");
        }
        windows += got.len();
    }
    Ok(format!("exemplars classify; 1000 sequences, {windows} windows exact"))
}

// ----------------------------------------------------- desk-scale pipeline

struct Desk {
    _dir: tempfile::TempDir,
    out: PathBuf,
    seconds: f64,
}

fn pipeline(out: &Path) -> Result<f64, String> {
    let t = Instant::now();
    for stage in ["synth", "all"] {
        let o = Command::new(env!("CARGO_BIN_EXE_rm-metrics"))
            .env_remove("RM_METRICS_CONFIG")
            .args([stage, "--seed", DESK_SEED, "--out"])
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        if !o.status.success() {
            return Err(format!("`{stage}` failed: {}", String::from_utf8_lossy(&o.stderr)));
        }
    }
    Ok(t.elapsed().as_secs_f64())
}

fn desk() -> Result<&'static Desk, String> {
    static DESK: OnceLock<Result<Desk, String>> = OnceLock::new();
    DESK.get_or_init(|| {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let out = dir.path().join("out");
        let seconds = pipeline(&out)?;
        Ok(Desk { _dir: dir, out, seconds })
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Rows of a header-led CSV without quoted fields, keyed by column name.
fn csv(path: &Path) -> Vec<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines
        .map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn num(row: &BTreeMap<String, String>, col: &str) -> f64 {
    row[col].parse().unwrap()
}

fn c6_stability() -> Outcome {
    let d = desk()?;
    let spec = json(&d.out.join("synth/synth_spec.json"));
    let planted = spec["stable_fraction"].as_f64().unwrap();
    ensure!(planted == 0.82, "planted stable fraction {planted}");
    let summary = json(&d.out.join("report/summary.json"));
    let got = summary["stability"].as_f64().ok_or("stability undefined")?;
    ensure!((got - planted).abs() <= 0.02, "stability {got} vs planted {planted}");
    let n_authors = spec["n_authors"].as_u64().unwrap();
    ensure!(n_authors == 10_000, "{n_authors} authors");
    let cfg = fs::read_to_string(d.out.join("trends/config.txt")).unwrap();
    ensure!(cfg.lines().any(|l| l.trim() == "window = 10"), "window is not 10");
    Ok(format!("{got:.4} vs planted {planted} at n = {n_authors}"))
}

fn c7_trends() -> Outcome {
    let d = desk()?;
    let spec = json(&d.out.join("synth/synth_spec.json"));
    let mut worst = 0.0f64;
    for (file, key, first, last) in [
        ("trend_fox_fraction.csv", "style_mix", 0.55, 0.40),
        ("trend_generalist_teams.csv", "generalist_team_share", 0.50, 0.36),
    ] {
        let planted = spec[key].as_object().unwrap();
        let at = |dec: &str| planted[dec].as_f64().unwrap();
        ensure!((at("1960") - first).abs() < 1e-12 && (at("2010") - last).abs() < 1e-12, "{key} endpoints");
        let rows = csv(&d.out.join("report").join(file));
        ensure!(rows.len() == 6, "{file}: {} decades", rows.len());
        for row in rows {
            let dec = &row["decade"];
            let (got, want) = (num(&row, "fraction"), at(dec));
            ensure!((got - want).abs() <= 0.03, "{file} {dec}: {got} vs planted {want}");
            worst = worst.max((got - want).abs());
        }
    }
    Ok(format!("12 decade shares, largest gap {:.2} points", worst * 100.0))
}

fn c8_decline() -> Outcome {
    let d = desk()?;
    let spec = json(&d.out.join("synth/synth_spec.json"));
    let mut planted: BTreeMap<(String, u64), f64> = BTreeMap::new();
    for p in spec["planted_rates"].as_array().unwrap() {
        let group = p["group"].as_str().unwrap().to_lowercase();
        planted.insert((group, p["n_fields"].as_u64().unwrap()), p["rate"].as_f64().unwrap());
    }
    let (r3, r10) = (planted[&("specialist".into(), 3)], planted[&("specialist".into(), 10)]);
    ensure!((r3 - 0.055).abs() < 1e-12 && (r10 - 0.043).abs() < 1e-12, "planted rates {r3} {r10}");
    let target = (r3 - r10) / r3 * 100.0;

    let got = json(&d.out.join("report/summary.json"))["specialist_decline_pct"]
        .as_f64()
        .ok_or("decline undefined")?;
    ensure!((got - target).abs() <= 5.0, "decline {got:.2}% vs planted {target:.2}%");

    let (mut bins, mut covered) = (0, 0);
    for row in csv(&d.out.join("report/fig2_curves.csv")) {
        if row["metric"] != "p_top5_disruptive" {
            continue;
        }
        let Some(&rate) = planted.get(&(row["group"].clone(), row["n_fields"].parse().unwrap())) else {
            continue;
        };
        bins += 1;
        covered += usize::from(num(&row, "ci_lo") <= rate && rate <= num(&row, "ci_hi"));
    }
    ensure!(bins > 0, "no planted bins in the curve");
    ensure!(covered * 10 >= bins * 9, "CIs cover {covered} of {bins} bins");
    Ok(format!("decline {got:.2}% vs planted {target:.2}%; CIs cover {covered}/{bins} bins"))
}

fn c9_odds() -> Outcome {
    let printed = [
        (0.267, 1.31),
        (0.608, 1.84),
        (-0.214, 0.81),
        (-0.186, 0.83),
        (-0.053, 0.95),
        (-0.056, 0.95),
        (-0.004, 0.996),
        (-0.006, 0.99),
    ];
    let coef: Vec<f64> = printed.iter().map(|p| p.0).collect();
    let ors = odds_ratios(&coef);
    let mut worst = 0.0f64;
    for ((c, want), got) in printed.iter().zip(&ors) {
        ensure!((got - want).abs() < 0.005, "exp({c}) = {got} vs printed {want}");
        worst = worst.max((got - want).abs());
    }
    Ok(format!("8 odds ratios, largest gap {worst:.4}"))
}

fn c10_irls() -> Outcome {
    let target = 0.267;
    let (mut within, mut worst_score) = (0, 0.0f64);
    let mut last = None;
    for seed in 0..20 {
        let x = generate_logit_design(&LogitDesignSpec {
            seed,
            ..LogitDesignSpec::default()
        });
        ensure!(x.n() == 50_000, "n = {}", x.n());
        let fit = fit_logistic(&x, &FitOptions::default()).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure!(fit.converged, "seed {seed} did not converge");
        ensure!(fit.score_norm < 1e-6, "seed {seed}: score norm {}", fit.score_norm);
        worst_score = worst_score.max(fit.score_norm);
        within += usize::from((fit.coef[1] - target).abs() <= 2.0 * fit.se[1]);
        last = Some((x, fit));
    }
    ensure!(within >= 19, "{within}/20 within 2 SE");

    let (x, fit) = last.unwrap();
    let beta: Vec<f64> = fit.coef.iter().zip(&fit.se).map(|(b, s)| b + 0.5 * s).collect();
    let g = score(&x, &beta);
    let mut worst_rel = 0.0f64;
    for j in 0..beta.len() {
        let h = 1e-6 * (1.0 + beta[j].abs());
        let (mut up, mut dn) = (beta.clone(), beta.clone());
        up[j] += h;
        dn[j] -= h;
        let fd = (log_likelihood(&x, &up) - log_likelihood(&x, &dn)) / (2.0 * h);
        let rel = (fd - g[j]).abs() / g[j].abs().max(1.0);
        ensure!(rel <= 1e-4, "gradient {j}: analytic {} vs difference {fd}", g[j]);
        worst_rel = worst_rel.max(rel);
    }
    Ok(format!(
        "{within}/20 within 2 SE; max score norm {worst_score:.1e}; gradient rel. error {worst_rel:.1e}"
    ))
}

fn c11_flags() -> Outcome {
    // d = i/100 for i in 0..100, shuffled
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut order: Vec<u32> = (0..100).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let scores: Vec<DisruptionScore<Ratio<i64>>> = order
        .iter()
        .enumerate()
        .map(|(p, &i)| DisruptionScore::from_counts(PaperId(p as u32), i, 0, 100 - i))
        .collect();
    let flags = top_percentile_flags(&scores, 5.0).map_err(|e| e.to_string())?;
    let flagged: Vec<u32> = order.iter().zip(&flags).filter(|(_, &f)| f).map(|(&i, _)| i).collect();
    ensure!(flagged.len() == 5, "{} flagged", flagged.len());
    ensure!(flagged.iter().all(|&i| i >= 95), "flagged {flagged:?}");

    // ten papers tie at the top of twenty, plus one undefined
    let mut tied: Vec<DisruptionScore<f64>> = (0..20)
        .map(|p| {
            let ni = if p < 10 { 4 } else { p as u32 % 4 };
            DisruptionScore::from_counts(PaperId(p), ni, 0, 4 - ni)
        })
        .collect();
    tied.push(DisruptionScore::from_counts(PaperId(20), 0, 0, 0));
    let flags = top_percentile_flags(&tied, 5.0).map_err(|e| e.to_string())?;
    ensure!(flags[..10].iter().all(|&f| f), "tied values not all flagged");
    ensure!(!flags[10..].iter().any(|&f| f), "untied or undefined value flagged");
    Ok("5 of 100 flagged; all 10 tied values flagged".into())
}

fn bundle(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        files.insert(e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap());
    }
    files
}

fn c12_determinism() -> Outcome {
    let d = desk()?;
    let first = bundle(&d.out.join("report"));
    let saved = d.out.with_file_name("first_report");
    fs::create_dir_all(&saved).map_err(|e| e.to_string())?;
    for (name, bytes) in &first {
        fs::write(saved.join(name), bytes).map_err(|e| e.to_string())?;
    }
    // clear the stage caches so the second run recomputes everything
    fs::remove_dir_all(&d.out).map_err(|e| e.to_string())?;
    let second_secs = pipeline(&d.out)?;
    let second = bundle(&d.out.join("report"));
    ensure!(first.keys().eq(second.keys()), "bundle file lists differ");
    for (name, bytes) in &first {
        ensure!(second[name] == *bytes, "report/{name} differs between runs");
    }
    ensure!(bundle(&saved) == second, "saved copy differs");
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    ensure!(d.seconds < 60.0, "first run took {:.1}s", d.seconds);
    Ok(format!(
        "{} report files byte-identical; runs took {:.1}s and {second_secs:.1}s on {threads} thread(s)",
        first.len(),
        d.seconds
    ))
}
