//! Pipeline configuration: a flat `key = value` file, per-key overrides, and
//! a canonical rendering that is echoed into every output directory.

use std::fmt::Write as _;
use std::path::Path;

use rm_metrics_core::atypicality::Summary;
use rm_metrics_core::corpus::{InputFormat, TaxonomyLevel};
use rm_metrics_core::format::sig6;
use rm_metrics_core::style::Cohort;
use rm_metrics_core::teams::TeamFieldRule;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    /// Corpus location. Empty means the `synth` directory under the output.
    pub input: String,
    pub format: InputFormat,
    pub level: TaxonomyLevel,
    pub min_papers: usize,
    pub start_before: i32,
    pub all_authored: bool,
    pub cohort: Cohort,
    pub window: usize,
    pub stability_min_papers: usize,
    pub team_field_rule: TeamFieldRule,
    pub include_same_year: bool,
    pub top_pct: f64,
    pub null_samples: usize,
    pub swaps_per_edge: usize,
    pub summary: Summary,
    pub bootstrap_b: usize,
    pub ci_level: f64,
    pub min_bin: usize,
    pub min_fields: usize,
    pub max_iter: usize,
    pub tolerance: f64,
    pub decline_from: usize,
    pub decline_to: usize,
    pub seed: u64,
    pub synth_authors: usize,
    /// Optional JSON spec; overrides `synth_authors`.
    pub synth_spec: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input: String::new(),
            format: InputFormat::CsvBundle,
            level: TaxonomyLevel::Field,
            min_papers: 3,
            start_before: 2015,
            all_authored: false,
            cohort: Cohort::FirstPubDecade,
            window: 10,
            stability_min_papers: 10,
            team_field_rule: TeamFieldRule::MemberPrimary,
            include_same_year: true,
            top_pct: 5.0,
            null_samples: 10,
            swaps_per_edge: 10,
            summary: Summary::TenthPercentile,
            bootstrap_b: 1000,
            ci_level: 0.95,
            min_bin: 30,
            min_fields: 2,
            max_iter: 50,
            tolerance: 1e-8,
            decline_from: 3,
            decline_to: 10,
            seed: 0,
            synth_authors: 10_000,
            synth_spec: String::new(),
        }
    }
}

/// Every key, in rendering order.
pub const KEYS: &[&str] = &[
    "input",
    "format",
    "level",
    "min_papers",
    "start_before",
    "all_authored",
    "cohort",
    "window",
    "stability_min_papers",
    "team_field_rule",
    "include_same_year",
    "top_pct",
    "null_samples",
    "swaps_per_edge",
    "summary",
    "bootstrap_b",
    "ci_level",
    "min_bin",
    "min_fields",
    "max_iter",
    "tolerance",
    "decline_from",
    "decline_to",
    "seed",
    "synth_authors",
    "synth_spec",
];

fn level_str(l: TaxonomyLevel) -> &'static str {
    match l {
        TaxonomyLevel::Field => "field292",
        TaxonomyLevel::Discipline => "discipline19",
    }
}

fn cohort_str(c: Cohort) -> &'static str {
    match c {
        Cohort::FirstPubDecade => "first_pub_decade",
        Cohort::ActiveDecade => "active_decade",
    }
}

fn rule_str(r: TeamFieldRule) -> &'static str {
    match r {
        TeamFieldRule::MemberPrimary => "member_primary",
        TeamFieldRule::CareerUnion => "career_union",
    }
}

fn parse_rule(s: &str) -> Option<TeamFieldRule> {
    match s {
        "member_primary" => Some(TeamFieldRule::MemberPrimary),
        "career_union" => Some(TeamFieldRule::CareerUnion),
        _ => None,
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("`{key}`: cannot parse `{v}`"))
}

fn pick<T>(key: &str, v: &str, parsed: Option<T>, allowed: &str) -> Result<T, String> {
    parsed.ok_or_else(|| format!("`{key}`: `{v}` is not one of {allowed}"))
}

impl PipelineConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "input" => self.input = v.to_string(),
            "format" => self.format = pick(key, v, InputFormat::parse(v), "jsonl, csv-bundle")?,
            "level" => {
                self.level = pick(key, v, TaxonomyLevel::parse(v), "field292, discipline19")?
            }
            "min_papers" => self.min_papers = num(key, v)?,
            "start_before" => self.start_before = num(key, v)?,
            "all_authored" => self.all_authored = pick(key, v, parse_bool(v), "true, false")?,
            "cohort" => {
                self.cohort = pick(key, v, Cohort::parse(v), "first_pub_decade, active_decade")?
            }
            "window" => self.window = num(key, v)?,
            "stability_min_papers" => self.stability_min_papers = num(key, v)?,
            "team_field_rule" => {
                self.team_field_rule = pick(key, v, parse_rule(v), "member_primary, career_union")?
            }
            "include_same_year" => {
                self.include_same_year = pick(key, v, parse_bool(v), "true, false")?
            }
            "top_pct" => self.top_pct = num(key, v)?,
            "null_samples" => self.null_samples = num(key, v)?,
            "swaps_per_edge" => self.swaps_per_edge = num(key, v)?,
            "summary" => self.summary = pick(key, v, Summary::parse(v), "p10, median")?,
            "bootstrap_b" => self.bootstrap_b = num(key, v)?,
            "ci_level" => self.ci_level = num(key, v)?,
            "min_bin" => self.min_bin = num(key, v)?,
            "min_fields" => self.min_fields = num(key, v)?,
            "max_iter" => self.max_iter = num(key, v)?,
            "tolerance" => self.tolerance = num(key, v)?,
            "decline_from" => self.decline_from = num(key, v)?,
            "decline_to" => self.decline_to = num(key, v)?,
            "seed" => self.seed = num(key, v)?,
            "synth_authors" => self.synth_authors = num(key, v)?,
            "synth_spec" => self.synth_spec = v.to_string(),
            other => return Err(format!("unknown config key `{other}`")),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "input" => self.input.clone(),
            "format" => self.format.as_str().to_string(),
            "level" => level_str(self.level).to_string(),
            "min_papers" => self.min_papers.to_string(),
            "start_before" => self.start_before.to_string(),
            "all_authored" => self.all_authored.to_string(),
            "cohort" => cohort_str(self.cohort).to_string(),
            "window" => self.window.to_string(),
            "stability_min_papers" => self.stability_min_papers.to_string(),
            "team_field_rule" => rule_str(self.team_field_rule).to_string(),
            "include_same_year" => self.include_same_year.to_string(),
            "top_pct" => sig6(self.top_pct),
            "null_samples" => self.null_samples.to_string(),
            "swaps_per_edge" => self.swaps_per_edge.to_string(),
            "summary" => self.summary.as_str().to_string(),
            "bootstrap_b" => self.bootstrap_b.to_string(),
            "ci_level" => sig6(self.ci_level),
            "min_bin" => self.min_bin.to_string(),
            "min_fields" => self.min_fields.to_string(),
            "max_iter" => self.max_iter.to_string(),
            "tolerance" => sig6(self.tolerance),
            "decline_from" => self.decline_from.to_string(),
            "decline_to" => self.decline_to.to_string(),
            "seed" => self.seed.to_string(),
            "synth_authors" => self.synth_authors.to_string(),
            "synth_spec" => self.synth_spec.clone(),
            _ => return None,
        })
    }

    /// Apply a `key = value` text. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("{origin}:{}: expected `key = value`", i + 1))
            })?;
            self.set(k, v)
                .map_err(|e| CliError::Validation(format!("{origin}:{}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, &path.display().to_string())?;
        Ok(cfg)
    }

    /// Apply a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<(), CliError> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("--set expects key=value, got `{kv}`")))?;
        self.set(k, v).map_err(CliError::Validation)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: &str| Err(CliError::Validation(m.to_string()));
        if self.min_papers == 0 {
            return fail("min_papers must be at least 1");
        }
        if self.window == 0 {
            return fail("window must be at least 1");
        }
        if !(self.top_pct > 0.0 && self.top_pct <= 100.0) {
            return fail("top_pct must be in (0, 100]");
        }
        if self.null_samples < 2 {
            return fail("null_samples must be at least 2");
        }
        if self.bootstrap_b == 0 {
            return fail("bootstrap_b must be at least 1");
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return fail("ci_level must be in (0, 1)");
        }
        if self.decline_from >= self.decline_to {
            return fail("decline_from must be below decline_to");
        }
        if !(self.tolerance > 0.0) {
            return fail("tolerance must be positive");
        }
        if self.max_iter == 0 {
            return fail("max_iter must be at least 1");
        }
        Ok(())
    }

    /// One `key = value` line per key, in [`KEYS`] order.
    pub fn render(&self) -> String {
        self.render_keys(KEYS)
    }

    pub fn render_keys(&self, keys: &[&str]) -> String {
        let mut s = String::new();
        for k in keys {
            let _ = writeln!(s, "{k} = {}", self.get(k).expect("known key"));
        }
        s
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.render().as_bytes()))
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
