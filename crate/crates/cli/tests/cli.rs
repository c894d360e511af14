use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;

use rm_metrics::{PipelineConfig, StageManifest};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rm-metrics"));
    c.env_remove("RM_METRICS_CONFIG");
    c
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// A small synthetic corpus shared by the tests; each test copies it.
fn corpus() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let d = tempfile::tempdir().unwrap();
        let o = run(d.path(), &["synth", "--seed", "4", "--set", "synth_authors=800"]);
        assert!(o.status.success(), "{}", stderr(&o));
        d
    })
    .path()
}

fn fresh() -> tempfile::TempDir {
    let d = tempfile::tempdir().unwrap();
    fs::create_dir_all(d.path().join("synth")).unwrap();
    for e in fs::read_dir(corpus().join("synth")).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), d.path().join("synth").join(e.file_name())).unwrap();
    }
    d
}

const FAST: &[&str] = &["--seed", "4", "--set", "bootstrap_b=200", "--set", "null_samples=4"];

fn with(args: &[&'static str]) -> Vec<&'static str> {
    args.iter().chain(FAST).copied().collect()
}

#[test]
fn regress_before_disrupt_names_disrupt() {
    let d = fresh();
    for s in ["ingest", "styles", "teams"] {
        assert!(run(d.path(), &with(&[s])).status.success());
    }
    let o = run(d.path(), &with(&["regress"]));
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("`disrupt`") && !msg.contains("`teams`"), "{msg}");
}

#[test]
fn report_on_empty_dir_lists_every_missing_artifact() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["report"]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    for f in ["trend_fox_fraction.csv", "trend_generalist_teams.csv", "regression.txt", "fig2_curves.csv"] {
        assert!(msg.contains(f), "{f} not listed in {msg}");
    }
}

#[test]
fn full_run_writes_artifacts_and_manifests() {
    let d = fresh();
    let o = run(d.path(), &with(&["all"]));
    assert!(o.status.success(), "{}", stderr(&o));
    let out = d.path();
    for f in [
        "styles/author_profiles.csv",
        "styles/trend_fox_fraction.csv",
        "teams/team_records.csv",
        "disrupt/disruption.csv",
        "atypical/atypicality.csv",
        "atypical/null_diagnostics.json",
        "regress/regression.txt",
        "curves/fig2_curves.csv",
        "report/summary.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let head = |f: &str| fs::read_to_string(out.join(f)).unwrap().lines().next().unwrap().to_string();
    assert_eq!(head("styles/author_profiles.csv"), "author_id,s_score,style,n_papers,distinct_fields,first_pub_year");
    assert_eq!(head("teams/team_records.csv"), "paper_id,composition,team_size,n_team_fields,mean_career_age,fully_overlapping,year");
    assert_eq!(head("disrupt/disruption.csv"), "paper_id,d,n_i,n_j,n_k,defined,top5_flag");
    assert_eq!(head("atypical/atypicality.csv"), "paper_id,a,n_pairs,defined,summary_kind");
    assert_eq!(head("curves/fig2_curves.csv"), "metric,group,n_fields,mean,ci_lo,ci_hi,n");

    let summary: BTreeMap<String, serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(out.join("report/summary.json")).unwrap()).unwrap();
    let keys: Vec<&str> = summary.keys().map(String::as_str).collect();
    assert_eq!(keys, ["fox_1960s", "fox_2010s", "specialist_decline_pct", "stability"]);

    let top: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let stages = top["stages"].as_object().unwrap();
    for s in ["ingest", "styles", "teams", "trends", "disrupt", "atypical", "regress", "curves", "report"] {
        assert!(stages.contains_key(s), "{s} missing from top-level manifest");
    }

    let mut cfg = PipelineConfig::default();
    cfg.apply_text(&fs::read_to_string(out.join("report/config.txt")).unwrap(), "echo").unwrap();
    assert_eq!((cfg.seed, cfg.bootstrap_b, cfg.null_samples), (4, 200, 4));
    for s in ["ingest", "styles", "teams", "trends", "disrupt", "atypical", "regress", "curves", "report"] {
        let dir = out.join(s);
        let m: StageManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m.seed, 4);
        assert!(m.corpus_checksum.is_some());
        assert_eq!(m.seconds.is_some(), s != "report");
        let mut listed: Vec<&str> = m.files.iter().map(|f| f.path.as_str()).collect();
        listed.sort();
        let mut present: Vec<String> = fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .filter(|f| f != "manifest.json")
            .collect();
        present.sort();
        assert_eq!(listed, present, "{s}");
        for f in &m.files {
            let bytes = fs::read(dir.join(&f.path)).unwrap();
            use sha2::Digest;
            let hex: String = sha2::Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
            assert_eq!(hex, f.sha256, "{s}/{}", f.path);
        }
        assert_eq!(fs::read_to_string(dir.join("config.txt")).unwrap(), cfg.render());
    }

    // second run is served from the stage caches
    let o = run(out, &with(&["all"]));
    assert!(o.status.success());
    assert_eq!(stderr(&o).matches("up to date").count(), 9, "{}", stderr(&o));

    // a bootstrap change reruns curves and report only
    let o = run(out, &["all", "--seed", "4", "--set", "bootstrap_b=300", "--set", "null_samples=4"]);
    assert!(o.status.success());
    let log = stderr(&o);
    assert!(log.contains("ingest: up to date") && log.contains("atypical: up to date"), "{log}");
    assert!(log.contains("curves: done") && log.contains("report: done"), "{log}");
}

#[test]
fn discipline_level_labels_the_table() {
    let d = fresh();
    let o = run(d.path(), &with(&["all", "--level", "discipline19"]));
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(d.path().join("report/regression.txt")).unwrap();
    assert!(table.contains("discipline19 (19 disciplines)"), "{table}");
    assert!(table.contains("Is Generalist Team") && table.contains("Odds Ratio"));
}

#[test]
fn changed_upstream_config_is_stale() {
    let d = fresh();
    for s in ["ingest", "styles", "teams", "disrupt"] {
        assert!(run(d.path(), &with(&[s])).status.success());
    }
    let o = run(d.path(), &["styles", "--seed", "4", "--set", "min_papers=4"]);
    assert!(o.status.success());
    let o = run(d.path(), &with(&["regress"]));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`teams`"), "{}", stderr(&o));
}

#[test]
fn config_file_from_environment_and_validation_errors() {
    let d = fresh();
    let cfg = d.path().join("pipeline.conf");
    fs::write(&cfg, "# test config\nwindow = 0\n").unwrap();
    let o = bin()
        .env("RM_METRICS_CONFIG", &cfg)
        .args(["ingest", "--out"])
        .arg(d.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("window"), "{}", stderr(&o));

    fs::write(&cfg, "nonsense_key = 3\n").unwrap();
    let o = run(d.path(), &["ingest", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pipeline.conf:1"), "{}", stderr(&o));

    let o = run(d.path(), &["ingest", "--level", "field19"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn malformed_input_is_a_data_error() {
    let d = tempfile::tempdir().unwrap();
    let input = d.path().join("in");
    fs::create_dir_all(&input).unwrap();
    fs::write(input.join("works.jsonl"), "{\"id\": \"W1\", \"publication_year\": 2000}\n{oops\n").unwrap();
    let o = run(
        d.path(),
        &["ingest", "--set", &format!("input={}", input.display()), "--set", "format=jsonl"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains(":2:"), "{}", stderr(&o));

    let o = run(d.path(), &["ingest", "--set", "input=/nonexistent/corpus"]);
    assert_eq!(o.status.code(), Some(1));
}
