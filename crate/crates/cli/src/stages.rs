//! Pipeline stages, their artifacts, and the manifests that chain them.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rm_metrics_core::atypicality::{compute_atypicality, NullModelConfig};
use rm_metrics_core::corpus::{input_checksum, input_files, read_cache, write_cache, Corpus};
use rm_metrics_core::corpus::{load_corpus, TaxonomyLevel};
use rm_metrics_core::disruption::{disruption_all, top_percentile_flags, DisruptionOptions};
use rm_metrics_core::format::sig6;
use rm_metrics_core::inference::{
    atypicality_values, binned_metric_vs_fields, build_design_matrix, fit_logistic, render_table,
    top5_values, CurveMetric, CurveOptions, DesignMatrix, FitOptions,
};
use rm_metrics_core::style::{
    build_profiles, fox_fraction_by_cohort, stability_fraction, CohortPoint, ProfileIndex,
    Stability, StyleOptions,
};
use rm_metrics_core::synth::{synthesize, write_synthetic, SynthSpec};
use rm_metrics_core::teams::{generalist_team_share_by_decade, team_records, Composition, TeamRecord};
use rm_metrics_core::{Atypicality, Curve, Disruption, Error, Profile};

use crate::config::{hex, PipelineConfig};
use crate::output::{io_err, read_json, sha256_file, write_file, write_json, Csv};
use crate::CliError;

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Synth,
    Ingest,
    Styles,
    Teams,
    Trends,
    Disrupt,
    Atypical,
    Regress,
    Curves,
    Report,
}

/// Stages `all` runs, in order.
pub const PIPELINE: &[Stage] = &[
    Stage::Ingest,
    Stage::Styles,
    Stage::Teams,
    Stage::Trends,
    Stage::Disrupt,
    Stage::Atypical,
    Stage::Regress,
    Stage::Curves,
    Stage::Report,
];

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Styles => "styles",
            Stage::Teams => "teams",
            Stage::Trends => "trends",
            Stage::Disrupt => "disrupt",
            Stage::Atypical => "atypical",
            Stage::Regress => "regress",
            Stage::Curves => "curves",
            Stage::Report => "report",
        }
    }

    pub fn deps(self) -> &'static [Stage] {
        match self {
            Stage::Synth | Stage::Ingest => &[],
            Stage::Styles | Stage::Disrupt | Stage::Atypical => &[Stage::Ingest],
            Stage::Teams => &[Stage::Styles],
            Stage::Trends => &[Stage::Styles, Stage::Teams],
            Stage::Regress => &[Stage::Teams, Stage::Disrupt],
            Stage::Curves => &[Stage::Teams, Stage::Disrupt, Stage::Atypical],
            Stage::Report => &[Stage::Trends, Stage::Regress, Stage::Curves],
        }
    }

    /// Config keys whose values change this stage's outputs.
    fn config_keys(self) -> &'static [&'static str] {
        match self {
            Stage::Synth => &["format", "seed", "synth_authors", "synth_spec"],
            Stage::Ingest => &["format"],
            Stage::Styles => &["level", "min_papers", "start_before", "all_authored", "cohort"],
            Stage::Teams => &["team_field_rule"],
            Stage::Trends => &["cohort", "window", "stability_min_papers"],
            Stage::Disrupt => &["include_same_year", "top_pct"],
            Stage::Atypical => &["null_samples", "swaps_per_edge", "summary", "seed"],
            Stage::Regress => &["max_iter", "tolerance", "level", "top_pct"],
            Stage::Curves => &["bootstrap_b", "ci_level", "min_bin", "min_fields", "seed"],
            Stage::Report => &["decline_from", "decline_to", "cohort"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: String,
    /// Hash of the stage's config subset and its upstream keys.
    pub key: String,
    pub upstream: BTreeMap<String, String>,
    pub config_hash: String,
    pub corpus_checksum: Option<String>,
    pub seed: u64,
    /// Wall-clock seconds. Left out of the report bundle so that it is
    /// byte-identical across runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
    pub files: Vec<FileEntry>,
}

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG_ECHO: &str = "config.txt";
const CORPUS_CACHE: &str = "corpus.bin";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ran,
    Cached,
}

#[derive(Serialize, Deserialize)]
struct DisruptSidecar {
    scores: Vec<Disruption>,
    flags: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct TrendsSidecar {
    fox: Vec<CohortPoint>,
    generalist_teams: Vec<CohortPoint>,
    stability: Option<Stability>,
    window: usize,
}

/// Headline numbers of a complete run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub fox_1960s: Option<f64>,
    pub fox_2010s: Option<f64>,
    pub stability: Option<f64>,
    pub specialist_decline_pct: Option<f64>,
}

/// Files the report is assembled from, relative to the output directory.
const REPORT_INPUTS: &[(Stage, &str)] = &[
    (Stage::Trends, "trend_fox_fraction.csv"),
    (Stage::Trends, "trend_generalist_teams.csv"),
    (Stage::Trends, "trends.json"),
    (Stage::Regress, "regression.txt"),
    (Stage::Curves, "fig2_curves.csv"),
    (Stage::Curves, "curves.json"),
];

pub struct Pipeline {
    cfg: PipelineConfig,
    out: PathBuf,
    config_text: String,
    config_hash: String,
    corpus: Option<Corpus>,
}

fn sha_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex(&h.finalize())
}

fn data(e: Error) -> CliError {
    CliError::Data(e)
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig, out: &Path) -> Self {
        Self {
            config_text: cfg.render(),
            config_hash: cfg.hash(),
            cfg,
            out: out.to_path_buf(),
            corpus: None,
        }
    }

    pub fn dir(&self, stage: Stage) -> PathBuf {
        match stage {
            Stage::Synth => self.input_path(),
            s => self.out.join(s.name()),
        }
    }

    pub fn input_path(&self) -> PathBuf {
        if self.cfg.input.is_empty() {
            self.out.join("synth")
        } else {
            PathBuf::from(&self.cfg.input)
        }
    }

    pub fn manifest(&self, stage: Stage) -> Option<StageManifest> {
        let path = self.dir(stage).join(MANIFEST);
        path.exists().then(|| read_json(&path).ok()).flatten()
    }

    fn key_for(&self, stage: Stage, upstream: &BTreeMap<String, String>, extra: &str) -> String {
        let subset = self.cfg.render_keys(stage.config_keys());
        let mut parts = vec![stage.name(), subset.as_str(), extra];
        for (k, v) in upstream {
            parts.push(k);
            parts.push(v);
        }
        sha_hex(&parts)
    }

    /// Recorded key of `stage`, after checking that it and everything above
    /// it were produced under the current configuration.
    fn current_key(&self, stage: Stage, needed_by: Stage) -> Result<String, CliError> {
        let m = self.manifest(stage).ok_or_else(|| CliError::Missing {
            stages: vec![stage.name()],
            needed_by: needed_by.name(),
            out: self.out.clone(),
        })?;
        if stage == Stage::Ingest {
            return Ok(m.key);
        }
        let up = self.upstream(stage)?;
        if m.key != self.key_for(stage, &up, "") {
            return Err(CliError::Stale {
                stage: stage.name(),
                needed_by: needed_by.name(),
            });
        }
        Ok(m.key)
    }

    fn upstream(&self, stage: Stage) -> Result<BTreeMap<String, String>, CliError> {
        let mut keys = BTreeMap::new();
        let mut missing = Vec::new();
        for &d in stage.deps() {
            if self.manifest(d).is_none() {
                missing.push(d.name());
                continue;
            }
            keys.insert(d.name().to_string(), self.current_key(d, stage)?);
        }
        if !missing.is_empty() {
            return Err(CliError::Missing {
                stages: missing,
                needed_by: stage.name(),
                out: self.out.clone(),
            });
        }
        Ok(keys)
    }

    fn cache_valid(&self, stage: Stage, key: &str) -> bool {
        let Some(m) = self.manifest(stage) else {
            return false;
        };
        let dir = self.dir(stage);
        m.key == key
            && m.files.iter().all(|f| {
                sha256_file(&dir.join(&f.path)).map_or(false, |s| s == f.sha256)
            })
    }

    fn corpus_checksum(&self) -> Option<String> {
        self.manifest(Stage::Ingest).and_then(|m| m.corpus_checksum)
    }

    /// Run one stage unless its outputs are current.
    pub fn run(&mut self, stage: Stage) -> Result<Outcome, CliError> {
        if stage == Stage::Report {
            self.check_report_inputs()?;
        }
        let upstream = self.upstream(stage)?;
        let (extra, checksum) = match stage {
            Stage::Ingest => {
                let input = self.input_path();
                if !input.exists() {
                    return Err(CliError::Validation(format!(
                        "input {} does not exist; set `input` or run `rm-metrics synth` first",
                        input.display()
                    )));
                }
                let files = input_files(&input, self.cfg.format);
                let sum = hex(&input_checksum(&files).map_err(data)?);
                (sum.clone(), Some(sum))
            }
            Stage::Synth if !self.cfg.synth_spec.is_empty() => {
                let path = Path::new(&self.cfg.synth_spec);
                (sha256_file(path)?, None)
            }
            Stage::Synth => (String::new(), None),
            _ => (String::new(), self.corpus_checksum()),
        };
        let key = self.key_for(stage, &upstream, &extra);
        if self.cache_valid(stage, &key) {
            eprintln!("{}: up to date", stage.name());
            self.record_top_level(stage, None)?;
            return Ok(Outcome::Cached);
        }
        let dir = self.dir(stage);
        if let Some(old) = self.manifest(stage) {
            for f in &old.files {
                let _ = fs::remove_file(dir.join(&f.path));
            }
            let _ = fs::remove_file(dir.join(MANIFEST));
        }
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        let t = Instant::now();
        let mut files = self.exec(stage, &dir)?;
        let seconds = t.elapsed().as_secs_f64();
        write_file(&dir.join(CONFIG_ECHO), &self.config_text)?;
        files.push(CONFIG_ECHO.to_string());
        files.sort();
        let entries = files
            .iter()
            .map(|f| {
                let p = dir.join(f);
                let bytes = fs::metadata(&p).map_err(|e| io_err(&p, e))?.len();
                Ok(FileEntry {
                    path: f.clone(),
                    sha256: sha256_file(&p)?,
                    bytes,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let manifest = StageManifest {
            stage: stage.name().to_string(),
            key,
            upstream,
            config_hash: self.config_hash.clone(),
            corpus_checksum: checksum,
            seed: self.cfg.seed,
            seconds: (stage != Stage::Report).then(|| round6(seconds)),
            files: entries,
        };
        write_json(&dir.join(MANIFEST), &manifest)?;
        eprintln!("{}: done in {:.2}s", stage.name(), seconds);
        self.record_top_level(stage, Some(seconds))?;
        Ok(Outcome::Ran)
    }

    /// Merge this stage into `<out>/manifest.json`, which lists every stage
    /// run into the output directory.
    fn record_top_level(&self, stage: Stage, seconds: Option<f64>) -> Result<(), CliError> {
        let path = self.out.join(MANIFEST);
        let mut top: serde_json::Map<String, serde_json::Value> = if path.exists() {
            read_json(&path)?
        } else {
            serde_json::Map::new()
        };
        top.insert("config_hash".into(), self.config_hash.clone().into());
        top.insert("seed".into(), self.cfg.seed.into());
        if let Some(c) = self.corpus_checksum() {
            top.insert("corpus_checksum".into(), c.into());
        }
        let m = self.manifest(stage).expect("stage manifest written");
        let mut entry = serde_json::to_value(&m).map_err(|e| io_err(&path, e))?;
        let obj = entry.as_object_mut().expect("manifest is an object");
        obj.insert("dir".into(), self.dir(stage).display().to_string().into());
        obj.insert("cached".into(), seconds.is_none().into());
        if let Some(s) = seconds {
            obj.insert("seconds".into(), round6(s).into());
        }
        let stages = top
            .entry("stages")
            .or_insert_with(|| serde_json::Value::Object(Default::default()));
        stages
            .as_object_mut()
            .expect("stages is an object")
            .insert(stage.name().into(), entry);
        write_json(&path, &top)
    }

    fn check_report_inputs(&self) -> Result<(), CliError> {
        let missing: Vec<String> = REPORT_INPUTS
            .iter()
            .map(|(s, f)| self.dir(*s).join(f))
            .chain(
                [Stage::Trends, Stage::Regress, Stage::Curves]
                    .iter()
                    .map(|s| self.dir(*s).join(MANIFEST)),
            )
            .filter(|p| !p.exists())
            .map(|p| p.display().to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(CliError::MissingArtifacts(missing))
        }
    }

    fn corpus(&mut self) -> Result<&Corpus, CliError> {
        if self.corpus.is_none() {
            let path = self.dir(Stage::Ingest).join(CORPUS_CACHE);
            let c = read_cache(&path, None).map_err(data)?.ok_or_else(|| {
                CliError::Stale {
                    stage: "ingest",
                    needed_by: "load",
                }
            })?;
            self.corpus = Some(c);
        }
        Ok(self.corpus.as_ref().expect("loaded"))
    }

    fn style_options(&self) -> StyleOptions {
        StyleOptions {
            level: self.cfg.level,
            min_papers: self.cfg.min_papers,
            start_before: self.cfg.start_before,
            all_authored: self.cfg.all_authored,
        }
    }

    fn sidecar<T: serde::de::DeserializeOwned>(&self, stage: Stage, file: &str) -> Result<T, CliError> {
        read_json(&self.dir(stage).join(file))
    }

    /// Produce a stage's files in `dir` and return their names.
    fn exec(&mut self, stage: Stage, dir: &Path) -> Result<Vec<String>, CliError> {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        match stage {
            Stage::Synth => {
                let spec = if self.cfg.synth_spec.is_empty() {
                    SynthSpec::with_authors(self.cfg.synth_authors, self.cfg.seed)
                } else {
                    let path = Path::new(&self.cfg.synth_spec);
                    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
                    SynthSpec::from_json(&text).map_err(|e| CliError::Validation(e.to_string()))?
                };
                spec.validate().map_err(|e| CliError::Validation(e.to_string()))?;
                let (corpus, truth) = synthesize(&spec).map_err(data)?;
                write_synthetic(dir, &corpus, &truth, &spec, self.cfg.format).map_err(data)?;
                let agreement = truth.planting.as_ref().map(|p| sig6(p.agreement()));
                eprintln!(
                    "synth: {} papers, planting agreement {}",
                    corpus.papers.len(),
                    agreement.as_deref().unwrap_or("n/a")
                );
                let mut files: Vec<String> = fs::read_dir(dir)
                    .map_err(|e| io_err(dir, e))?
                    .filter_map(|e| e.ok())
                    .map(|e| e.file_name().to_string_lossy().into_owned())
                    .filter(|f| f != MANIFEST && f != CONFIG_ECHO)
                    .collect();
                files.sort();
                Ok(files)
            }
            Stage::Ingest => {
                let input = self.input_path();
                let files = input_files(&input, self.cfg.format);
                let sum = input_checksum(&files).map_err(data)?;
                let corpus = load_corpus(&input, self.cfg.format).map_err(data)?;
                write_cache(&dir.join(CORPUS_CACHE), &corpus, &sum).map_err(data)?;
                let tax = corpus.taxonomy();
                let summary = serde_json::json!({
                    "papers": corpus.papers().len(),
                    "authors": corpus.authors().len(),
                    "venues": corpus.venues().len(),
                    "reference_edges": corpus.n_edges(),
                    "fields": tax.count_at(TaxonomyLevel::Field),
                    "disciplines": tax.count_at(TaxonomyLevel::Discipline),
                    "year_range": corpus.year_range(),
                    "report": corpus.ingest_report(),
                });
                write_json(&dir.join("ingest_report.json"), &summary)?;
                self.corpus = Some(corpus);
                Ok(names(&[CORPUS_CACHE, "ingest_report.json"]))
            }
            Stage::Styles => {
                let opts = self.style_options();
                let cohort = self.cfg.cohort;
                let corpus = self.corpus()?;
                let profiles = build_profiles::<f64>(corpus, &opts);
                let mut csv = Csv::new(&[
                    "author_id",
                    "s_score",
                    "style",
                    "n_papers",
                    "distinct_fields",
                    "first_pub_year",
                ]);
                for p in &profiles {
                    csv.row([
                        corpus.author(p.author).key.clone(),
                        sig6(p.s_score),
                        p.style.as_str().to_string(),
                        p.n_first_authored.to_string(),
                        p.distinct_fields.to_string(),
                        p.first_pub_year.to_string(),
                    ]);
                }
                write_file(&dir.join("author_profiles.csv"), csv.finish())?;
                write_file(
                    &dir.join("trend_fox_fraction.csv"),
                    cohort_csv(&fox_fraction_by_cohort(&profiles, cohort)),
                )?;
                write_json(&dir.join("profiles.json"), &profiles)?;
                Ok(names(&["author_profiles.csv", "trend_fox_fraction.csv", "profiles.json"]))
            }
            Stage::Teams => {
                let profiles: Vec<Profile> = self.sidecar(Stage::Styles, "profiles.json")?;
                let rule = self.cfg.team_field_rule;
                let corpus = self.corpus()?;
                let index = ProfileIndex::new(&profiles, corpus.authors().len());
                let records = team_records(corpus, &index, rule).map_err(data)?;
                let mut csv = Csv::new(&[
                    "paper_id",
                    "composition",
                    "team_size",
                    "n_team_fields",
                    "mean_career_age",
                    "fully_overlapping",
                    "year",
                ]);
                for r in &records {
                    csv.row([
                        corpus.paper(r.paper).key.clone(),
                        r.composition.as_str().to_string(),
                        r.team_size.to_string(),
                        opt(r.n_team_fields),
                        sig6(r.mean_career_age),
                        opt(r.fully_overlapping),
                        r.year.to_string(),
                    ]);
                }
                write_file(&dir.join("team_records.csv"), csv.finish())?;
                write_json(&dir.join("teams.json"), &records)?;
                Ok(names(&["team_records.csv", "teams.json"]))
            }
            Stage::Trends => {
                let profiles: Vec<Profile> = self.sidecar(Stage::Styles, "profiles.json")?;
                let records: Vec<TeamRecord> = self.sidecar(Stage::Teams, "teams.json")?;
                let opts = self.style_options();
                let (window, min) = (self.cfg.window, self.cfg.stability_min_papers);
                let fox = fox_fraction_by_cohort(&profiles, self.cfg.cohort);
                let corpus = self.corpus()?;
                let stability = match stability_fraction(&profiles, corpus, &opts, window, min) {
                    Ok(s) => Some(s),
                    Err(Error::EmptyCohort) => None,
                    Err(e) => return Err(data(e)),
                };
                let generalist_teams = generalist_team_share_by_decade(&records);
                write_file(&dir.join("trend_fox_fraction.csv"), cohort_csv(&fox))?;
                write_file(&dir.join("trend_generalist_teams.csv"), cohort_csv(&generalist_teams))?;
                let mut st = Csv::new(&["window", "min_papers", "stable", "eligible", "fraction"]);
                if let Some(s) = &stability {
                    st.row([
                        window.to_string(),
                        min.max(window).to_string(),
                        s.stable.to_string(),
                        s.eligible.to_string(),
                        sig6(s.fraction),
                    ]);
                }
                write_file(&dir.join("stability.csv"), st.finish())?;
                let side = TrendsSidecar {
                    fox,
                    generalist_teams,
                    stability,
                    window,
                };
                write_json(&dir.join("trends.json"), &side)?;
                Ok(names(&[
                    "trend_fox_fraction.csv",
                    "trend_generalist_teams.csv",
                    "stability.csv",
                    "trends.json",
                ]))
            }
            Stage::Disrupt => {
                let opts = DisruptionOptions {
                    include_same_year: self.cfg.include_same_year,
                };
                let pct = self.cfg.top_pct;
                let corpus = self.corpus()?;
                let scores = disruption_all::<f64>(corpus, opts);
                let flags = top_percentile_flags(&scores, pct).map_err(data)?;
                let mut csv =
                    Csv::new(&["paper_id", "d", "n_i", "n_j", "n_k", "defined", "top5_flag"]);
                for (s, f) in scores.iter().zip(&flags) {
                    csv.row([
                        corpus.paper(s.paper).key.clone(),
                        if s.defined { sig6(s.d) } else { String::new() },
                        s.n_i.to_string(),
                        s.n_j.to_string(),
                        s.n_k.to_string(),
                        s.defined.to_string(),
                        f.to_string(),
                    ]);
                }
                write_file(&dir.join("disruption.csv"), csv.finish())?;
                write_json(&dir.join("disruption.json"), &DisruptSidecar { scores, flags })?;
                Ok(names(&["disruption.csv", "disruption.json"]))
            }
            Stage::Atypical => {
                let cfg = NullModelConfig {
                    samples: self.cfg.null_samples,
                    swaps_per_edge: self.cfg.swaps_per_edge,
                    seed: self.cfg.seed,
                    summary: self.cfg.summary,
                };
                let corpus = self.corpus()?;
                let run = compute_atypicality::<f64>(corpus, &cfg);
                let table = |scores: &[Atypicality]| {
                    let mut csv =
                        Csv::new(&["paper_id", "a", "n_pairs", "defined", "summary_kind"]);
                    for s in scores {
                        csv.row([
                            corpus.paper(s.paper).key.clone(),
                            if s.defined { sig6(s.a) } else { String::new() },
                            s.n_pairs.to_string(),
                            s.defined.to_string(),
                            s.summary.as_str().to_string(),
                        ]);
                    }
                    csv.finish()
                };
                write_file(&dir.join("atypicality.csv"), table(&run.scores))?;
                write_file(&dir.join("atypicality_alternative.csv"), table(&run.alternative))?;
                let diag = serde_json::json!({
                    "samples": cfg.samples,
                    "swaps_per_edge": cfg.swaps_per_edge,
                    "seed": cfg.seed,
                    "years": run.diagnostics,
                });
                write_json(&dir.join("null_diagnostics.json"), &diag)?;
                write_json(&dir.join("atypicality.json"), &run.scores)?;
                Ok(names(&[
                    "atypicality.csv",
                    "atypicality_alternative.csv",
                    "null_diagnostics.json",
                    "atypicality.json",
                ]))
            }
            Stage::Regress => {
                let records: Vec<TeamRecord> = self.sidecar(Stage::Teams, "teams.json")?;
                let d: DisruptSidecar = self.sidecar(Stage::Disrupt, "disruption.json")?;
                let design: DesignMatrix<f64> =
                    build_design_matrix(&records, &d.scores, &d.flags).map_err(data)?;
                let opts = FitOptions {
                    tolerance: self.cfg.tolerance,
                    max_iter: self.cfg.max_iter,
                    ..FitOptions::default()
                };
                let fit = fit_logistic(&design, &opts).map_err(data)?;
                let level = self.cfg.level;
                let n_cats = self.corpus()?.taxonomy().count_at(level);
                let label = level_label(level, n_cats);
                let title = format!(
                    "Logistic regression of top-{}% disruption on team composition, taxonomy {label}",
                    sig6(self.cfg.top_pct)
                );
                write_file(&dir.join("regression.txt"), render_table(&title, &[(&label, &fit)]))?;
                write_json(&dir.join("regression.json"), &fit)?;
                Ok(names(&["regression.txt", "regression.json"]))
            }
            Stage::Curves => {
                let records: Vec<TeamRecord> = self.sidecar(Stage::Teams, "teams.json")?;
                let d: DisruptSidecar = self.sidecar(Stage::Disrupt, "disruption.json")?;
                let a: Vec<Atypicality> = self.sidecar(Stage::Atypical, "atypicality.json")?;
                let opts = CurveOptions {
                    b: self.cfg.bootstrap_b,
                    level: self.cfg.ci_level,
                    seed: self.cfg.seed,
                    min_bin: self.cfg.min_bin,
                    min_fields: self.cfg.min_fields,
                };
                let curves: Vec<Curve> = vec![
                    binned_metric_vs_fields(
                        &records,
                        CurveMetric::MeanAtypicality,
                        &atypicality_values(&a),
                        &opts,
                    )
                    .map_err(data)?,
                    binned_metric_vs_fields(
                        &records,
                        CurveMetric::PTop5Disruptive,
                        &top5_values::<f64, f64>(&d.scores, &d.flags),
                        &opts,
                    )
                    .map_err(data)?,
                ];
                let mut csv =
                    Csv::new(&["metric", "group", "n_fields", "mean", "ci_lo", "ci_hi", "n"]);
                for c in &curves {
                    for b in &c.bins {
                        csv.row([
                            c.metric.as_str().to_string(),
                            b.group.as_str().to_string(),
                            b.n_fields.to_string(),
                            sig6(b.mean),
                            sig6(b.ci_lo),
                            sig6(b.ci_hi),
                            b.n.to_string(),
                        ]);
                    }
                }
                write_file(&dir.join("fig2_curves.csv"), csv.finish())?;
                write_json(&dir.join("curves.json"), &curves)?;
                Ok(names(&["fig2_curves.csv", "curves.json"]))
            }
            Stage::Report => {
                let trends: TrendsSidecar = self.sidecar(Stage::Trends, "trends.json")?;
                let curves: Vec<Curve> = self.sidecar(Stage::Curves, "curves.json")?;
                let fox = |decade: i32| {
                    trends
                        .fox
                        .iter()
                        .find(|p| p.decade == decade)
                        .map(|p| round6(p.fraction))
                };
                let decline = curves
                    .iter()
                    .find(|c| c.metric == CurveMetric::PTop5Disruptive)
                    .and_then(|c| {
                        c.relative_decline_pct(
                            Composition::Specialist,
                            self.cfg.decline_from,
                            self.cfg.decline_to,
                        )
                    });
                let summary = Summary {
                    fox_1960s: fox(1960),
                    fox_2010s: fox(2010),
                    stability: trends.stability.as_ref().map(|s| round6(s.fraction)),
                    specialist_decline_pct: decline.map(round6),
                };
                write_json(&dir.join("summary.json"), &summary)?;
                let mut files = vec!["summary.json".to_string()];
                for (s, f) in REPORT_INPUTS.iter().filter(|(_, f)| !f.ends_with(".json")) {
                    let src = self.dir(*s).join(f);
                    let bytes = fs::read(&src).map_err(|e| io_err(&src, e))?;
                    write_file(&dir.join(f), bytes)?;
                    files.push(f.to_string());
                }
                Ok(files)
            }
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn round6(x: f64) -> f64 {
    sig6(x).parse().unwrap_or(x)
}

fn cohort_csv(points: &[CohortPoint]) -> String {
    let mut csv = Csv::new(&["decade", "fraction", "n"]);
    for p in points {
        csv.row([p.decade.to_string(), sig6(p.fraction), p.n.to_string()]);
    }
    csv.finish()
}

/// Model label naming the taxonomy level and how many categories it has.
pub fn level_label(level: TaxonomyLevel, n: usize) -> String {
    match level {
        TaxonomyLevel::Field => format!("field{n} ({n} fields)"),
        TaxonomyLevel::Discipline => format!("discipline{n} ({n} disciplines)"),
    }
}
