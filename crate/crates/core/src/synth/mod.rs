//! Synthetic corpora with planted ground truth.
//!
//! Careers are generated first: every author gets a start year, a number of
//! first-authored papers and a field sequence built to realize an intended
//! style (and, for long careers, a stable or crossing trajectory). Fox and
//! hedgehog counts are exact quotas per start decade. Team papers are then
//! staffed with co-authors of a chosen style, references are drawn from
//! strictly earlier papers, and [`plant_disruption_structure`] rewires
//! citations so a chosen set of papers lands exactly in the top percentile
//! of the disruption index.

mod careers;
mod logit;
mod rewire;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use logit::{generate_logit_design, LogitDesignSpec};

use crate::corpus::{
    write_csv_bundle, write_jsonl, Corpus, CorpusBuilder, InputFormat, RawAuthorship,
    RawFieldScore, RawTaxon, RawWork,
};
use crate::disruption::{disruption_all, top_percentile_flags, DisruptionOptions};
use crate::error::{Error, Result};
use crate::seed::derive_seed;
use crate::style::{decade_of, Style};
use crate::teams::Composition;
use careers::{crossing_sequence, fox_sequence, hedgehog_sequence, min_crossing_len, mode};
use rewire::Graph;

pub const GROUND_TRUTH_FILE: &str = "ground_truth.json";
pub const SPEC_FILE: &str = "synth_spec.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PapersPerAuthor {
    /// Short careers draw uniformly from `min..=short_max` papers.
    pub min: usize,
    pub short_max: usize,
    /// Share of long careers, drawn from `long_min..=long_max`.
    pub long_share: f64,
    pub long_min: usize,
    pub long_max: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConcentration {
    /// Share of a hedgehog's papers in its dominant field, in `[0.5, 1]`.
    /// At 1.0 every stable hedgehog has S = 1.
    pub hedgehog_share: f64,
    /// Number of fields a fox rotates through (at least 4).
    pub fox_pool: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TeamSizeDist {
    pub solo_share: f64,
    /// Pure teams span `1..=max_fields` member fields, uniformly.
    pub max_fields: usize,
    /// Probability of 0, 1, 2, ... extra members beyond one per field.
    pub extra_members: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedRate {
    pub group: Composition,
    pub n_fields: usize,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSpec {
    pub min: usize,
    pub max: usize,
    /// Probability a reference comes from the paper's own field.
    pub own_field: f64,
    /// Probability it comes from a co-author's field; otherwise any field.
    pub member_field: f64,
    pub external_share: f64,
    /// Share of papers whose references are drawn from random fields.
    pub atypical_share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_authors: usize,
    pub n_fields: usize,
    pub n_disciplines: usize,
    pub n_venues: usize,
    /// Inclusive publication year range.
    pub years: (i32, i32),
    /// Authors start strictly before this year.
    pub start_before: i32,
    /// Fox fraction per start decade.
    pub style_mix: BTreeMap<i32, f64>,
    pub papers_per_author: PapersPerAuthor,
    pub field_concentration: FieldConcentration,
    /// Share of authors with at least ten papers whose trajectory never
    /// crosses.
    pub stable_fraction: f64,
    pub team_size_dist: TeamSizeDist,
    /// Share of generalist teams among pure teams, per publication decade.
    pub generalist_team_share: BTreeMap<i32, f64>,
    pub mixed_team_share: f64,
    pub planted_rates: Vec<PlantedRate>,
    pub top_pct: f64,
    pub references: ReferenceSpec,
    pub seed: u64,
}

fn linear(from: f64, to: f64, decades: &[i32]) -> BTreeMap<i32, f64> {
    let last = (decades.len() - 1).max(1) as f64;
    decades
        .iter()
        .enumerate()
        .map(|(i, &d)| (d, from + (to - from) * i as f64 / last))
        .collect()
}

impl SynthSpec {
    /// Desk-scale defaults: 10,000 authors over 1960-2019.
    pub fn desk_scale(seed: u64) -> Self {
        let decades = [1960, 1970, 1980, 1990, 2000, 2010];
        let mut planted_rates: Vec<PlantedRate> = (3..=10)
            .map(|k| PlantedRate {
                group: Composition::Specialist,
                n_fields: k,
                rate: 0.055 - 0.012 * (k - 3) as f64 / 7.0,
            })
            .collect();
        planted_rates.extend((2..=10).map(|k| PlantedRate {
            group: Composition::Generalist,
            n_fields: k,
            rate: 0.055,
        }));
        Self {
            n_authors: 10_000,
            n_fields: 292,
            n_disciplines: 19,
            n_venues: 584,
            years: (1960, 2019),
            start_before: 2015,
            style_mix: linear(0.55, 0.40, &decades),
            papers_per_author: PapersPerAuthor {
                min: 3,
                short_max: 4,
                long_share: 0.15,
                long_min: 10,
                long_max: 30,
            },
            field_concentration: FieldConcentration {
                hedgehog_share: 0.7,
                fox_pool: 6,
            },
            stable_fraction: 0.82,
            team_size_dist: TeamSizeDist {
                solo_share: 0.25,
                max_fields: 10,
                extra_members: vec![0.6, 0.3, 0.1],
            },
            generalist_team_share: linear(0.50, 0.36, &decades),
            mixed_team_share: 0.2,
            planted_rates,
            top_pct: 5.0,
            references: ReferenceSpec {
                min: 5,
                max: 12,
                own_field: 0.6,
                member_field: 0.3,
                external_share: 0.05,
                atypical_share: 0.02,
            },
            seed,
        }
    }

    /// Desk-scale spec with fewer authors, for quick runs.
    pub fn with_authors(n_authors: usize, seed: u64) -> Self {
        Self {
            n_authors,
            ..Self::desk_scale(seed)
        }
    }

    /// Parse a JSON spec; `seed` must be present.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("seed").map_or(true, |s| s.is_null()) {
            return Err(Error::InfeasibleSpec("seed is required".into()));
        }
        let spec: Self = serde_json::from_value(value)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InfeasibleSpec(m));
        let fractions = [
            ("stable_fraction", self.stable_fraction),
            ("mixed_team_share", self.mixed_team_share),
            ("solo_share", self.team_size_dist.solo_share),
            ("long_share", self.papers_per_author.long_share),
            ("own_field", self.references.own_field),
            ("member_field", self.references.member_field),
            ("external_share", self.references.external_share),
            ("atypical_share", self.references.atypical_share),
        ];
        for (name, v) in fractions {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} = {v} is not in [0, 1]"));
            }
        }
        for (d, v) in self.style_mix.iter().chain(&self.generalist_team_share) {
            if !(0.0..=1.0).contains(v) {
                return bad(format!("decade {d}: fraction {v} is not in [0, 1]"));
            }
        }
        for r in &self.planted_rates {
            if !(0.0..=1.0).contains(&r.rate) {
                return bad(format!("planted rate {} is not in [0, 1]", r.rate));
            }
        }
        if self.style_mix.is_empty() || self.generalist_team_share.is_empty() {
            return bad("style_mix and generalist_team_share need at least one decade".into());
        }
        let fc = &self.field_concentration;
        if !(0.5..=1.0).contains(&fc.hedgehog_share) {
            return bad(format!("hedgehog_share {} is not in [0.5, 1]", fc.hedgehog_share));
        }
        if fc.fox_pool < 4 {
            return bad(format!("fox_pool {} is below 4", fc.fox_pool));
        }
        if self.n_fields < fc.fox_pool + 3 {
            return bad(format!("{} fields cannot hold a fox pool of {}", self.n_fields, fc.fox_pool));
        }
        if self.n_disciplines == 0 || self.n_disciplines > self.n_fields || self.n_venues == 0 {
            return bad("need 1..=n_fields disciplines and at least one venue".into());
        }
        let ppa = &self.papers_per_author;
        if ppa.min < 1 || ppa.short_max < ppa.min || ppa.long_max < ppa.long_min || ppa.long_min < ppa.min {
            return bad("papers_per_author ranges are inconsistent".into());
        }
        if self.years.1 <= self.years.0 || self.start_before <= self.years.0 || self.start_before > self.years.1 {
            return bad("years and start_before are inconsistent".into());
        }
        let ts = &self.team_size_dist;
        let max_team = ts.max_fields + ts.extra_members.len().saturating_sub(1);
        if ts.max_fields == 0 || ts.extra_members.is_empty() {
            return bad("team_size_dist needs max_fields >= 1 and an extra-member distribution".into());
        }
        if max_team > self.n_authors {
            return bad(format!("team size {max_team} exceeds {} authors", self.n_authors));
        }
        if self.references.min == 0 || self.references.max < self.references.min {
            return bad("references need 1 <= min <= max".into());
        }
        if !(0.0..100.0).contains(&self.top_pct) || self.top_pct == 0.0 {
            return bad(format!("top_pct {} is not in (0, 100)", self.top_pct));
        }
        Ok(())
    }
}

/// Value for `decade`, falling back to the nearest configured decade.
fn for_decade(map: &BTreeMap<i32, f64>, decade: i32) -> f64 {
    if let Some(v) = map.get(&decade) {
        return *v;
    }
    let below = map.range(..decade).next_back();
    let above = map.range(decade..).next();
    match (below, above) {
        (Some((&a, &va)), Some((&b, &vb))) => va + (vb - va) * f64::from(decade - a) / f64::from(b - a),
        (Some((_, &v)), None) | (None, Some((_, &v))) => v,
        (None, None) => unreachable!("validated non-empty"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthPaper {
    pub year: i32,
    /// First author first.
    pub authors: Vec<u32>,
    pub field: u32,
    pub secondary_field: u32,
    pub venue: u32,
    pub refs: Vec<u32>,
    pub external_refs: Vec<String>,
}

/// Generated corpus in index form. Paper `i` has key [`paper_key`]`(i)`, and
/// papers are sorted by year.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthCorpus {
    pub n_authors: usize,
    pub n_fields: usize,
    pub n_disciplines: usize,
    pub n_venues: usize,
    pub papers: Vec<SynthPaper>,
}

pub fn paper_key(i: usize) -> String {
    format!("W{:07}", i + 1)
}

pub fn author_key(i: usize) -> String {
    format!("A{:06}", i + 1)
}

pub fn field_key(i: usize) -> String {
    format!("F{:03}", i + 1)
}

fn discipline_key(i: usize) -> String {
    format!("D{:02}", i + 1)
}

fn venue_key(i: usize) -> String {
    format!("V{:04}", i + 1)
}

impl SynthCorpus {
    pub fn discipline_of(&self, field: usize) -> usize {
        field * self.n_disciplines / self.n_fields
    }

    pub fn taxonomy(&self) -> Vec<RawTaxon> {
        let mut out: Vec<RawTaxon> = (0..self.n_disciplines)
            .map(|d| RawTaxon {
                id: discipline_key(d),
                name: format!("Discipline {}", d + 1),
                level: "discipline".into(),
                parent: None,
            })
            .collect();
        out.extend((0..self.n_fields).map(|f| RawTaxon {
            id: field_key(f),
            name: format!("Field {}", f + 1),
            level: "field".into(),
            parent: Some(discipline_key(self.discipline_of(f))),
        }));
        out
    }

    pub fn works(&self) -> Vec<RawWork> {
        self.papers
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let mut referenced_works: Vec<String> =
                    p.refs.iter().map(|&r| paper_key(r as usize)).collect();
                referenced_works.sort();
                referenced_works.extend(p.external_refs.iter().cloned());
                RawWork {
                    id: paper_key(i),
                    publication_year: p.year,
                    venue: Some(venue_key(p.venue as usize)),
                    authorships: p
                        .authors
                        .iter()
                        .enumerate()
                        .map(|(pos, &a)| RawAuthorship {
                            author_id: author_key(a as usize),
                            position: pos as u32,
                        })
                        .collect(),
                    referenced_works,
                    fields: vec![
                        RawFieldScore {
                            id: field_key(p.field as usize),
                            score: 0.8,
                            level: None,
                        },
                        RawFieldScore {
                            id: field_key(p.secondary_field as usize),
                            score: 0.3,
                            level: None,
                        },
                    ],
                }
            })
            .collect()
    }

    pub fn to_corpus(&self) -> Result<Corpus> {
        let mut b = CorpusBuilder::new("<synthetic>");
        b.taxonomy(self.taxonomy());
        for (i, w) in self.works().into_iter().enumerate() {
            b.push(i + 1, w);
        }
        b.build()
    }

    pub fn write(&self, dir: &Path, format: InputFormat) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let works = self.works();
        match format {
            InputFormat::Jsonl => write_jsonl(dir, &works, &self.taxonomy()),
            InputFormat::CsvBundle => write_csv_bundle(dir, &works, &self.taxonomy()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuthorTruth {
    pub id: String,
    pub style: Style,
    /// Trajectory planted not to cross; meaningful for ten or more papers.
    pub stable: bool,
    pub start_year: i32,
    pub n_first_authored: usize,
    pub primary_field: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PaperTruth {
    pub id: String,
    pub year: i32,
    pub team_size: usize,
    /// Composition from the members' planted styles.
    pub group: Composition,
    /// Distinct primary fields of the members.
    pub n_fields: usize,
    pub planted_disruptive: bool,
    /// No in-corpus references but cited, so d = 1 regardless of planting.
    pub forced_disruptive: bool,
    /// Planted citer split `(n_i - n_j) / (n_i + n_j)` over direct citers:
    /// 1 for disruptive papers, at most 0 for the rest, 0 without citers.
    pub disruption_intent: f64,
    /// Share of consolidating citers the rewiring aimed for (0 if planted).
    pub consolidation_target: f64,
    pub atypical: bool,
}

impl PaperTruth {
    pub fn expected_top(&self) -> bool {
        self.planted_disruptive || self.forced_disruptive
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quota {
    pub planted: f64,
    pub realized: f64,
    pub n: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PlantingSummary {
    pub defined: usize,
    pub flagged: usize,
    pub expected: usize,
    pub expected_flagged: usize,
    pub unexpected_flagged: usize,
    pub iterations: usize,
}

impl PlantingSummary {
    /// Share of flagged papers that were planted (or forced) and vice versa,
    /// the smaller of the two.
    pub fn agreement(&self) -> f64 {
        let p = self.expected_flagged as f64 / self.flagged.max(1) as f64;
        let r = self.expected_flagged as f64 / self.expected.max(1) as f64;
        p.min(r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub seed: u64,
    pub authors: Vec<AuthorTruth>,
    pub papers: Vec<PaperTruth>,
    /// Keyed by start decade.
    pub fox_fraction: BTreeMap<i32, Quota>,
    /// Keyed by publication decade, pure multi-author teams only.
    pub generalist_team_share: BTreeMap<i32, Quota>,
    pub stable_fraction: Quota,
    pub planting: Option<PlantingSummary>,
}

impl GroundTruth {
    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

struct Career {
    start: i32,
    style: Style,
    stable: bool,
    seq: Vec<u32>,
    years: Vec<i32>,
    mode: u32,
}

fn distinct_fields<R: Rng>(rng: &mut R, n_fields: usize, k: usize, avoid: &[u32]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::with_capacity(k);
    while out.len() < k {
        let f = rng.gen_range(0..n_fields) as u32;
        if !avoid.contains(&f) && !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

fn generate_careers(spec: &SynthSpec) -> Result<Vec<Career>> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 1, 0));
    let ppa = &spec.papers_per_author;
    let mut plan: Vec<(i32, usize)> = (0..spec.n_authors)
        .map(|_| {
            let start = rng.gen_range(spec.years.0..spec.start_before);
            let n = if rng.gen_bool(ppa.long_share) {
                rng.gen_range(ppa.long_min..=ppa.long_max)
            } else {
                rng.gen_range(ppa.min..=ppa.short_max)
            };
            (start, n)
        })
        .collect();
    plan.sort_by_key(|&(s, _)| s);

    // styles: exact quota per start decade
    let mut hedgehog = vec![false; plan.len()];
    let mut by_decade: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &(s, _)) in plan.iter().enumerate() {
        by_decade.entry(decade_of(s)).or_default().push(i);
    }
    for (&d, members) in &by_decade {
        let mut m = members.clone();
        m.shuffle(&mut rng);
        let foxes = (for_decade(&spec.style_mix, d) * m.len() as f64).round() as usize;
        for &i in &m[foxes..] {
            hedgehog[i] = true;
        }
    }

    // crossing trajectories: exact quota among careers of ten or more
    let long: Vec<usize> = (0..plan.len()).filter(|&i| plan[i].1 >= 10).collect();
    let crossing_n = ((1.0 - spec.stable_fraction) * long.len() as f64).round() as usize;
    let mut candidates: Vec<usize> = long
        .iter()
        .copied()
        .filter(|&i| plan[i].1 >= min_crossing_len(hedgehog[i]))
        .collect();
    if candidates.len() < crossing_n {
        return Err(Error::InfeasibleSpec(format!(
            "{crossing_n} crossing trajectories requested but only {} careers are long enough",
            candidates.len()
        )));
    }
    candidates.shuffle(&mut rng);
    let crossing: BTreeSet<usize> = candidates.into_iter().take(crossing_n).collect();

    let fc = &spec.field_concentration;
    let nf = spec.n_fields;
    let careers = plan
        .iter()
        .enumerate()
        .map(|(i, &(start, n))| {
            let dominant = rng.gen_range(0..nf) as u32;
            let pool = distinct_fields(&mut rng, nf, fc.fox_pool, &[dominant]);
            let seq = if crossing.contains(&i) {
                crossing_sequence(n, hedgehog[i], dominant, &pool)
            } else if hedgehog[i] {
                let secondary = distinct_fields(&mut rng, nf, 2, &[dominant]);
                hedgehog_sequence(&mut rng, n, dominant, &secondary, fc.hedgehog_share)
            } else {
                fox_sequence(n, &pool)
            };
            let last = (start + 35).min(spec.years.1);
            let mut years: Vec<i32> = std::iter::once(start)
                .chain((1..n).map(|_| rng.gen_range(start..=last)))
                .collect();
            years.sort_unstable();
            Career {
                start,
                style: if hedgehog[i] { Style::Hedgehog } else { Style::Fox },
                stable: !crossing.contains(&i),
                mode: mode(&seq),
                seq,
                years,
            }
        })
        .collect();
    Ok(careers)
}

/// Active authors by style, sorted by start year.
struct AuthorIndex {
    by_style: [Vec<u32>; 2],
    starts: [Vec<i32>; 2],
    by_field: [Vec<Vec<u32>>; 2],
}

fn style_slot(s: Style) -> usize {
    match s {
        Style::Fox => 0,
        Style::Hedgehog => 1,
    }
}

impl AuthorIndex {
    fn new(careers: &[Career], n_fields: usize) -> Self {
        let mut by_style = [Vec::new(), Vec::new()];
        let mut by_field = [vec![Vec::new(); n_fields], vec![Vec::new(); n_fields]];
        for (i, c) in careers.iter().enumerate() {
            let s = style_slot(c.style);
            by_style[s].push(i as u32);
            by_field[s][c.mode as usize].push(i as u32);
        }
        let starts = [0, 1].map(|s| by_style[s].iter().map(|&a| careers[a as usize].start).collect());
        Self {
            by_style,
            starts,
            by_field,
        }
    }

    fn active(&self, style: Style, year: i32) -> &[u32] {
        let s = style_slot(style);
        let n = self.starts[s].partition_point(|&y| y <= year);
        &self.by_style[s][..n]
    }

    fn active_in_field<'a>(&'a self, careers: &[Career], style: Style, field: u32, year: i32) -> &'a [u32] {
        let list = &self.by_field[style_slot(style)][field as usize];
        let n = list.partition_point(|&a| careers[a as usize].start <= year);
        &list[..n]
    }
}

fn pure_team<R: Rng>(
    rng: &mut R,
    careers: &[Career],
    index: &AuthorIndex,
    first: u32,
    year: i32,
    n_fields: usize,
    extra: usize,
) -> Vec<u32> {
    let style = careers[first as usize].style;
    let pool = index.active(style, year);
    let mut members = vec![first];
    let mut fields = vec![careers[first as usize].mode];
    let mut tries = 0;
    while fields.len() < n_fields && tries < 80 * n_fields && pool.len() > 1 {
        tries += 1;
        let b = pool[rng.gen_range(0..pool.len())];
        let f = careers[b as usize].mode;
        if !members.contains(&b) && !fields.contains(&f) {
            members.push(b);
            fields.push(f);
        }
    }
    let want = members.len() + extra + usize::from(members.len() + extra < 2);
    let mut tries = 0;
    while members.len() < want && tries < 40 * want {
        tries += 1;
        let f = fields[rng.gen_range(0..fields.len())];
        let list = index.active_in_field(careers, style, f, year);
        if list.is_empty() {
            continue;
        }
        let b = list[rng.gen_range(0..list.len())];
        if !members.contains(&b) {
            members.push(b);
        }
    }
    if members.len() < 2 {
        // no same-field partner: take any active author of the style
        if let Some(&b) = pool.iter().find(|&&b| b != first) {
            members.push(b);
        }
    }
    members
}

fn mixed_team<R: Rng>(
    rng: &mut R,
    careers: &[Career],
    index: &AuthorIndex,
    first: u32,
    year: i32,
    size: usize,
) -> Vec<u32> {
    let other = match careers[first as usize].style {
        Style::Fox => Style::Hedgehog,
        Style::Hedgehog => Style::Fox,
    };
    let mut members = vec![first];
    let opp = index.active(other, year);
    if opp.is_empty() {
        return members;
    }
    members.push(opp[rng.gen_range(0..opp.len())]);
    let mut tries = 0;
    while members.len() < size && tries < 40 * size {
        tries += 1;
        let style = if rng.gen_bool(0.5) { other } else { careers[first as usize].style };
        let pool = index.active(style, year);
        if pool.is_empty() {
            continue;
        }
        let b = pool[rng.gen_range(0..pool.len())];
        if !members.contains(&b) {
            members.push(b);
        }
    }
    members
}

fn sample_weighted<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// Generate careers, teams and references. Disruption structure is planted
/// separately by [`plant_disruption_structure`].
pub fn generate_corpus(spec: &SynthSpec) -> Result<(SynthCorpus, GroundTruth)> {
    spec.validate()?;
    let careers = generate_careers(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 2, 0));

    // first-authored papers in (year, author, position) order
    let mut slots: Vec<(i32, u32, usize)> = careers
        .iter()
        .enumerate()
        .flat_map(|(a, c)| c.years.iter().enumerate().map(move |(k, &y)| (y, a as u32, k)))
        .collect();
    slots.sort_unstable();

    // team plan: solo, pure or mixed, with exact pure-team quotas per decade
    #[derive(Copy, Clone, PartialEq)]
    enum Plan {
        Solo,
        Pure,
        Mixed,
    }
    let mut plan: Vec<Plan> = slots
        .iter()
        .map(|_| {
            if rng.gen_bool(spec.team_size_dist.solo_share) {
                Plan::Solo
            } else {
                Plan::Mixed
            }
        })
        .collect();
    let mut team_by_decade: BTreeMap<i32, [Vec<usize>; 2]> = BTreeMap::new();
    for (i, &(y, a, _)) in slots.iter().enumerate() {
        if plan[i] != Plan::Solo {
            team_by_decade.entry(decade_of(y)).or_default()[style_slot(careers[a as usize].style)].push(i);
        }
    }
    for (&d, [fox_led, hog_led]) in &team_by_decade {
        let g = for_decade(&spec.generalist_team_share, d);
        let total = fox_led.len() + hog_led.len();
        let mut pure = ((1.0 - spec.mixed_team_share) * total as f64).round();
        if g > 0.0 {
            pure = pure.min(fox_led.len() as f64 / g);
        }
        if g < 1.0 {
            pure = pure.min(hog_led.len() as f64 / (1.0 - g));
        }
        let n_gen = ((g * pure).round() as usize).min(fox_led.len());
        let n_spec = ((pure.round() as usize).saturating_sub(n_gen)).min(hog_led.len());
        for (list, n) in [(fox_led, n_gen), (hog_led, n_spec)] {
            let mut l = list.clone();
            l.shuffle(&mut rng);
            for &i in &l[..n] {
                plan[i] = Plan::Pure;
            }
        }
    }

    let index = AuthorIndex::new(&careers, spec.n_fields);
    let ts = &spec.team_size_dist;
    let vpf = (spec.n_venues / spec.n_fields).max(1);
    let mut papers: Vec<SynthPaper> = Vec::with_capacity(slots.len());
    for (i, &(year, a, k)) in slots.iter().enumerate() {
        let extra = sample_weighted(&mut rng, &ts.extra_members);
        let authors = match plan[i] {
            Plan::Solo => vec![a],
            Plan::Pure => {
                let n_fields = rng.gen_range(1..=ts.max_fields);
                pure_team(&mut rng, &careers, &index, a, year, n_fields, extra)
            }
            Plan::Mixed => {
                let size = rng.gen_range(2..=3 + extra);
                mixed_team(&mut rng, &careers, &index, a, year, size)
            }
        };
        let field = careers[a as usize].seq[k];
        let secondary_field = loop {
            let f = rng.gen_range(0..spec.n_fields) as u32;
            if f != field {
                break f;
            }
        };
        let venue = ((field as usize * vpf + rng.gen_range(0..vpf)) % spec.n_venues) as u32;
        papers.push(SynthPaper {
            year,
            authors,
            field,
            secondary_field,
            venue,
            refs: Vec::new(),
            external_refs: Vec::new(),
        });
    }

    // references from strictly earlier papers
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 3, 0));
    let years: Vec<i32> = papers.iter().map(|p| p.year).collect();
    let mut by_field: Vec<Vec<u32>> = vec![Vec::new(); spec.n_fields];
    for (i, p) in papers.iter().enumerate() {
        by_field[p.field as usize].push(i as u32);
    }
    let rs = &spec.references;
    let mut atypical = vec![false; papers.len()];
    let mut next_external = 0usize;
    for i in 0..papers.len() {
        let y = years[i];
        let earlier = years.partition_point(|&v| v < y);
        if earlier == 0 {
            continue;
        }
        let is_atypical = rng.gen_bool(rs.atypical_share);
        atypical[i] = is_atypical;
        let member_fields: Vec<u32> = papers[i].authors.iter().map(|&a| careers[a as usize].mode).collect();
        let want = rng.gen_range(rs.min..=rs.max);
        let mut refs: Vec<u32> = Vec::with_capacity(want);
        for _ in 0..want * 3 {
            if refs.len() >= want {
                break;
            }
            let u: f64 = rng.gen();
            let field = if is_atypical && refs.len() % 2 == 1 {
                None
            } else if u < rs.own_field {
                Some(papers[i].field)
            } else if u < rs.own_field + rs.member_field {
                Some(member_fields[rng.gen_range(0..member_fields.len())])
            } else {
                None
            };
            let list: &[u32] = match field {
                Some(f) => {
                    let l = &by_field[f as usize];
                    &l[..l.partition_point(|&p| years[p as usize] < y)]
                }
                None => {
                    let f = rng.gen_range(0..spec.n_fields);
                    let l = &by_field[f];
                    &l[..l.partition_point(|&p| years[p as usize] < y)]
                }
            };
            let r = if list.is_empty() {
                rng.gen_range(0..earlier) as u32
            } else {
                let back = (rng.gen::<f64>().powi(3) * list.len() as f64) as usize;
                list[list.len() - 1 - back.min(list.len() - 1)]
            };
            if !refs.contains(&r) {
                refs.push(r);
            }
        }
        refs.sort_unstable();
        papers[i].refs = refs;
        if rng.gen_bool(rs.external_share) {
            next_external += 1;
            papers[i].external_refs.push(format!("X{:07}", next_external));
        }
    }

    let corpus = SynthCorpus {
        n_authors: spec.n_authors,
        n_fields: spec.n_fields,
        n_disciplines: spec.n_disciplines,
        n_venues: spec.n_venues,
        papers,
    };
    let truth = ground_truth(spec, &careers, &corpus, &atypical);
    Ok((corpus, truth))
}

fn ground_truth(spec: &SynthSpec, careers: &[Career], corpus: &SynthCorpus, atypical: &[bool]) -> GroundTruth {
    let authors: Vec<AuthorTruth> = careers
        .iter()
        .enumerate()
        .map(|(i, c)| AuthorTruth {
            id: author_key(i),
            style: c.style,
            stable: c.stable,
            start_year: c.start,
            n_first_authored: c.seq.len(),
            primary_field: field_key(c.mode as usize),
        })
        .collect();
    let papers: Vec<PaperTruth> = corpus
        .papers
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let fox = p.authors.iter().any(|&a| careers[a as usize].style == Style::Fox);
            let hog = p.authors.iter().any(|&a| careers[a as usize].style == Style::Hedgehog);
            let group = match (fox, hog) {
                (true, false) => Composition::Generalist,
                (false, true) => Composition::Specialist,
                _ => Composition::Mixed,
            };
            let mut fields: Vec<u32> = p.authors.iter().map(|&a| careers[a as usize].mode).collect();
            fields.sort_unstable();
            fields.dedup();
            PaperTruth {
                id: paper_key(i),
                year: p.year,
                team_size: p.authors.len(),
                group,
                n_fields: fields.len(),
                planted_disruptive: false,
                forced_disruptive: false,
                disruption_intent: 0.0,
                consolidation_target: 0.0,
                atypical: atypical[i],
            }
        })
        .collect();

    let mut fox: BTreeMap<i32, (usize, usize)> = BTreeMap::new();
    for c in careers {
        let e = fox.entry(decade_of(c.start)).or_default();
        e.0 += usize::from(c.style == Style::Fox);
        e.1 += 1;
    }
    let fox_fraction = fox
        .into_iter()
        .map(|(d, (f, n))| {
            let q = Quota {
                planted: for_decade(&spec.style_mix, d),
                realized: f as f64 / n as f64,
                n,
            };
            (d, q)
        })
        .collect();
    let mut share: BTreeMap<i32, (usize, usize)> = BTreeMap::new();
    for p in &papers {
        if p.team_size >= 2 && p.group != Composition::Mixed {
            let e = share.entry(decade_of(p.year)).or_default();
            e.0 += usize::from(p.group == Composition::Generalist);
            e.1 += 1;
        }
    }
    let generalist_team_share = share
        .into_iter()
        .map(|(d, (g, n))| {
            let q = Quota {
                planted: for_decade(&spec.generalist_team_share, d),
                realized: g as f64 / n as f64,
                n,
            };
            (d, q)
        })
        .collect();
    let long: Vec<&Career> = careers.iter().filter(|c| c.seq.len() >= 10).collect();
    let stable_fraction = Quota {
        planted: spec.stable_fraction,
        realized: long.iter().filter(|c| c.stable).count() as f64 / long.len().max(1) as f64,
        n: long.len(),
    };
    GroundTruth {
        seed: spec.seed,
        authors,
        papers,
        fox_fraction,
        generalist_team_share,
        stable_fraction,
        planting: None,
    }
}

/// Rewire citations so the planted papers, and only those, form the top
/// `spec.top_pct` percent of defined disruption scores.
///
/// Papers in each `(group, n_fields)` bin of `spec.planted_rates` are
/// planted at that rate; other papers are planted in the background until
/// the planted set matches the size of the top percentile. After rewiring
/// the disruption index is recomputed through the regular ingestion path and
/// the background set is adjusted until the counts agree.
pub fn plant_disruption_structure(
    corpus: &mut SynthCorpus,
    truth: &mut GroundTruth,
    spec: &SynthSpec,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, 4, 0));
    let n = corpus.papers.len();
    let (first_year, last_year) = match (corpus.papers.first(), corpus.papers.last()) {
        (Some(f), Some(l)) => (f.year, l.year),
        _ => return Err(Error::NoPapers),
    };
    let years: Vec<i32> = corpus.papers.iter().map(|p| p.year).collect();
    let refs: Vec<Vec<u32>> = corpus.papers.iter().map(|p| p.refs.clone()).collect();
    let forced: Vec<bool> = (0..n).map(|i| refs[i].is_empty() && years[i] < last_year).collect();
    let plantable = |i: usize| years[i] > first_year && years[i] < last_year && !refs[i].is_empty();

    let mut planted = vec![false; n];
    let mut in_bin = vec![false; n];
    for rate in &spec.planted_rates {
        let members: Vec<usize> = (0..n)
            .filter(|&i| {
                let t = &truth.papers[i];
                t.team_size >= 2 && t.group == rate.group && t.n_fields == rate.n_fields
            })
            .collect();
        let n_forced = members.iter().filter(|&&i| forced[i]).count();
        let quota = ((rate.rate * members.len() as f64).round() as usize).saturating_sub(n_forced);
        let mut cands: Vec<usize> = members.iter().copied().filter(|&i| plantable(i)).collect();
        cands.shuffle(&mut rng);
        for &i in cands.iter().take(quota) {
            planted[i] = true;
        }
        for i in members {
            in_bin[i] = true;
        }
    }
    let mut background: Vec<usize> = (0..n).filter(|&i| !in_bin[i] && plantable(i)).collect();
    background.shuffle(&mut rng);
    let est_defined = (0..n)
        .filter(|&i| years[i] < last_year || !refs[i].is_empty())
        .count();
    let target = (spec.top_pct / 100.0 * est_defined as f64).ceil() as usize;
    let have = planted.iter().filter(|&&p| p).count() + forced.iter().filter(|&&f| f).count();
    let mut bg_planted: Vec<usize> = Vec::new();
    let mut bg_free: Vec<usize> = Vec::new();
    for (k, i) in background.into_iter().enumerate() {
        if k < target.saturating_sub(have) {
            planted[i] = true;
            bg_planted.push(i);
        } else {
            bg_free.push(i);
        }
    }

    let intent: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let mut g = Graph::new(years.clone(), refs, planted);
    for p in 0..n as u32 {
        if g.planted[p as usize] {
            g.make_disruptive(p);
        }
    }
    for p in 0..n as u32 {
        if years[p as usize] < last_year {
            g.ensure_citer(&mut rng, p)?;
        }
    }
    for p in (0..n as u32).rev() {
        if !g.planted[p as usize] {
            g.consolidate(&mut rng, p, 0.5 + 0.5 * intent[p as usize]);
        }
    }

    let write_back = |corpus: &mut SynthCorpus, g: &Graph| {
        for (p, r) in corpus.papers.iter_mut().zip(&g.refs) {
            p.refs = r.clone();
            p.refs.sort_unstable();
        }
    };
    let mut summary = PlantingSummary::default();
    for iteration in 1..=12 {
        write_back(corpus, &g);
        let built = corpus.to_corpus()?;
        let scores = disruption_all::<f64>(&built, DisruptionOptions::default());
        let flags = top_percentile_flags(&scores, spec.top_pct)?;
        let defined = scores.iter().filter(|s| s.defined).count();
        let k = (spec.top_pct / 100.0 * defined as f64 - 1e-9).ceil() as usize;
        let expected: Vec<bool> = (0..n).map(|i| g.planted[i] || forced[i]).collect();
        let expected_flagged = (0..n).filter(|&i| expected[i] && flags[i]).count();
        summary = PlantingSummary {
            defined,
            flagged: flags.iter().filter(|&&f| f).count(),
            expected: expected.iter().filter(|&&e| e).count(),
            expected_flagged,
            unexpected_flagged: (0..n).filter(|&i| !expected[i] && flags[i]).count(),
            iterations: iteration,
        };
        let stray: Vec<u32> = (0..n)
            .filter(|&i| !expected[i] && scores[i].defined && scores[i].d > 0.0)
            .map(|i| i as u32)
            .collect();
        let positives = (0..n).filter(|&i| expected[i] && scores[i].d > 0.0).count();
        if stray.is_empty() && positives == k && summary.expected == k {
            break;
        }
        for p in stray {
            g.consolidate(&mut rng, p, 1.0);
        }
        // planted papers can lose their only citer when a neighbour is
        // promoted; give them a new one, or drop them if they already have
        // citers but still are not positive
        let mut dead = 0;
        for i in 0..n {
            if expected[i] && !(scores[i].defined && scores[i].d > 0.0) {
                dead += 1;
                if g.citers[i].is_empty() {
                    g.ensure_citer(&mut rng, i as u32)?;
                } else if g.planted[i] {
                    g.planted[i] = false;
                    bg_planted.retain(|&b| b != i);
                    g.consolidate(&mut rng, i as u32, 0.5 + 0.5 * intent[i]);
                }
            }
        }
        if dead > 0 {
            continue;
        }
        if positives > k {
            for _ in 0..positives - k {
                let Some(p) = bg_planted.pop() else { break };
                g.planted[p] = false;
                g.consolidate(&mut rng, p as u32, 0.5 + 0.5 * intent[p]);
            }
        } else if positives < k {
            for _ in 0..k - positives {
                let Some(p) = bg_free.pop() else { break };
                g.planted[p] = true;
                g.make_disruptive(p as u32);
                g.ensure_citer(&mut rng, p as u32)?;
                bg_planted.insert(0, p);
            }
        }
    }
    write_back(corpus, &g);

    for (i, t) in truth.papers.iter_mut().enumerate() {
        t.planted_disruptive = g.planted[i];
        t.forced_disruptive = forced[i];
        let (ni, nj) = g.citer_split(i as u32);
        t.consolidation_target = if g.planted[i] || forced[i] { 0.0 } else { 0.5 + 0.5 * intent[i] };
        t.disruption_intent = if ni + nj == 0 {
            0.0
        } else {
            (ni as f64 - nj as f64) / (ni + nj) as f64
        };
    }
    truth.planting = Some(summary);
    Ok(())
}

/// Generate and plant in one step.
pub fn synthesize(spec: &SynthSpec) -> Result<(SynthCorpus, GroundTruth)> {
    let (mut corpus, mut truth) = generate_corpus(spec)?;
    plant_disruption_structure(&mut corpus, &mut truth, spec)?;
    Ok((corpus, truth))
}

/// Write corpus files, `ground_truth.json` and the resolved spec into `dir`.
pub fn write_synthetic(
    dir: &Path,
    corpus: &SynthCorpus,
    truth: &GroundTruth,
    spec: &SynthSpec,
    format: InputFormat,
) -> Result<()> {
    corpus.write(dir, format)?;
    truth.write(&dir.join(GROUND_TRUTH_FILE))?;
    write_json(&dir.join(SPEC_FILE), spec)
}
