//! Specialization (S) scores, fox/hedgehog classification, career-long
//! style trajectories and cohort trends.
//!
//! S is the largest share of an author's papers that falls in a single
//! field. Authors with S >= 0.5 are hedgehogs (specialists), the rest foxes
//! (generalists).

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TaxonomyLevel};
use crate::error::{Error, Result};
use crate::ids::{AuthorId, FieldId};
use crate::scalar::Fraction;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Style {
    Fox,
    Hedgehog,
}

impl Style {
    pub fn as_str(self) -> &'static str {
        match self {
            Style::Fox => "fox",
            Style::Hedgehog => "hedgehog",
        }
    }
}

/// Largest single-field share of `fields`.
pub fn s_score<T: Fraction>(fields: &[FieldId]) -> Result<T> {
    if fields.is_empty() {
        return Err(Error::NoPapers);
    }
    let mut counts: HashMap<FieldId, i64> = HashMap::new();
    for f in fields {
        *counts.entry(*f).or_default() += 1;
    }
    let max = counts.values().copied().max().unwrap();
    Ok(T::from_counts(max, fields.len() as i64))
}

pub fn classify_style<T: Fraction>(s: T) -> Result<Style> {
    if !(s > T::zero() && s <= T::one()) {
        return Err(Error::InvalidScore(s.to_f64_lossy()));
    }
    Ok(if s >= T::half() {
        Style::Hedgehog
    } else {
        Style::Fox
    })
}

/// Most frequent field, smallest id on ties.
pub fn mode_field(fields: &[FieldId]) -> Option<FieldId> {
    let mut counts: BTreeMap<FieldId, usize> = BTreeMap::new();
    for f in fields {
        *counts.entry(*f).or_default() += 1;
    }
    counts
        .into_iter()
        .fold(None::<(FieldId, usize)>, |best, (f, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((f, c)),
        })
        .map(|(f, _)| f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuthorProfile<T> {
    pub author: AuthorId,
    pub s_score: T,
    pub style: Style,
    /// Papers the score was computed from (first-authored by default).
    pub n_first_authored: usize,
    pub distinct_fields: usize,
    pub first_pub_year: i32,
    pub primary_field: FieldId,
    /// Sorted distinct fields of the scored papers.
    pub field_set: Vec<FieldId>,
    /// Decades (1960, 1970, ...) in which the author published anything.
    pub active_decades: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StyleOptions {
    pub level: TaxonomyLevel,
    pub min_papers: usize,
    pub start_before: i32,
    /// Score all authored papers instead of first-authored ones.
    pub all_authored: bool,
}

impl Default for StyleOptions {
    fn default() -> Self {
        Self {
            level: TaxonomyLevel::Field,
            min_papers: 3,
            start_before: 2015,
            all_authored: false,
        }
    }
}

pub fn decade_of(year: i32) -> i32 {
    year.div_euclid(10) * 10
}

/// Chronological primary fields of the papers an author is scored on.
/// Papers whose primary field cannot be resolved are skipped.
pub fn author_field_sequence(
    corpus: &Corpus,
    primary: &[Option<FieldId>],
    author: AuthorId,
    all_authored: bool,
) -> Vec<FieldId> {
    corpus
        .author(author)
        .papers
        .iter()
        .filter(|&&p| all_authored || corpus.paper(p).first_author() == author)
        .filter_map(|p| primary[p.index()])
        .collect()
}

/// Profiles for every eligible author with at least one scored paper,
/// sorted by author id.
pub fn build_profiles<T: Fraction>(corpus: &Corpus, opts: &StyleOptions) -> Vec<AuthorProfile<T>> {
    let primary = corpus.primary_fields(opts.level);
    let eligible: Vec<AuthorId> = corpus
        .eligible_authors(opts.min_papers, opts.start_before)
        .into_iter()
        .collect();
    eligible
        .par_iter()
        .filter_map(|&a| {
            let seq = author_field_sequence(corpus, &primary, a, opts.all_authored);
            let s = s_score::<T>(&seq).ok()?;
            let style = classify_style(s).ok()?;
            let mut field_set = seq.clone();
            field_set.sort_unstable();
            field_set.dedup();
            let rec = corpus.author(a);
            let mut active_decades: Vec<i32> = rec
                .papers
                .iter()
                .map(|p| decade_of(corpus.paper(*p).year))
                .collect();
            active_decades.sort_unstable();
            active_decades.dedup();
            Some(AuthorProfile {
                author: a,
                s_score: s,
                style,
                n_first_authored: seq.len(),
                distinct_fields: field_set.len(),
                first_pub_year: rec.first_pub_year,
                primary_field: mode_field(&seq)?,
                field_set,
                active_decades,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StyleTrajectory<T> {
    pub author: AuthorId,
    pub window: usize,
    /// (papers seen at the window's end, windowed S); the first entry has
    /// `window` papers, the last has all of them.
    pub values: Vec<(usize, T)>,
    /// All windowed scores on one side of 0.5 (0.5 counts as hedgehog).
    pub stable: bool,
}

/// S over every run of `window` consecutive entries of `seq`.
pub fn windowed_s_scores<T: Fraction>(seq: &[FieldId], window: usize) -> Result<Vec<T>> {
    if window == 0 || seq.len() < window {
        return Err(Error::InsufficientPapers {
            have: seq.len(),
            need: window.max(1),
        });
    }
    // counts per field plus a histogram of counts, so the running max can
    // only move by one per step
    let mut count: HashMap<FieldId, usize> = HashMap::new();
    let mut hist = vec![0usize; window + 1];
    let mut max = 0usize;
    let mut out = Vec::with_capacity(seq.len() - window + 1);
    for (i, &f) in seq.iter().enumerate() {
        if i >= window {
            let old = seq[i - window];
            let c = count.get_mut(&old).unwrap();
            hist[*c] -= 1;
            if *c == max && hist[*c] == 0 {
                max -= 1;
            }
            *c -= 1;
            hist[*c] += 1;
        }
        let c = count.entry(f).or_default();
        hist[*c] = hist[*c].saturating_sub(1);
        *c += 1;
        hist[*c] += 1;
        max = max.max(*c);
        if i + 1 >= window {
            out.push(T::from_counts(max as i64, window as i64));
        }
    }
    Ok(out)
}

pub fn is_stable<T: Fraction>(values: &[T]) -> bool {
    let half = T::half();
    values.iter().all(|v| *v >= half) || values.iter().all(|v| *v < half)
}

/// Sliding-window S over the author's chronological scored papers.
pub fn trajectory<T: Fraction>(
    author: AuthorId,
    corpus: &Corpus,
    level: TaxonomyLevel,
    window: usize,
) -> Result<StyleTrajectory<T>> {
    let primary = corpus.primary_fields(level);
    trajectory_with(author, corpus, &primary, window, false)
}

pub(crate) fn trajectory_with<T: Fraction>(
    author: AuthorId,
    corpus: &Corpus,
    primary: &[Option<FieldId>],
    window: usize,
    all_authored: bool,
) -> Result<StyleTrajectory<T>> {
    let seq = author_field_sequence(corpus, primary, author, all_authored);
    let scores = windowed_s_scores::<T>(&seq, window)?;
    let stable = is_stable(&scores);
    Ok(StyleTrajectory {
        author,
        window,
        values: scores
            .into_iter()
            .enumerate()
            .map(|(i, s)| (i + window, s))
            .collect(),
        stable,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stability {
    pub fraction: f64,
    pub stable: usize,
    pub eligible: usize,
}

/// Share of profiled authors with at least `min_papers` scored papers whose
/// windowed S never crosses 0.5.
pub fn stability_fraction<T: Fraction>(
    profiles: &[AuthorProfile<T>],
    corpus: &Corpus,
    opts: &StyleOptions,
    window: usize,
    min_papers: usize,
) -> Result<Stability> {
    let primary = corpus.primary_fields(opts.level);
    let need = min_papers.max(window);
    let flags: Vec<bool> = profiles
        .par_iter()
        .filter(|p| p.n_first_authored >= need)
        .map(|p| {
            trajectory_with::<T>(p.author, corpus, &primary, window, opts.all_authored)
                .map(|t| t.stable)
        })
        .collect::<Result<_>>()?;
    if flags.is_empty() {
        return Err(Error::EmptyCohort);
    }
    let stable = flags.iter().filter(|&&s| s).count();
    Ok(Stability {
        fraction: stable as f64 / flags.len() as f64,
        stable,
        eligible: flags.len(),
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Cohort {
    /// Decade of the author's first publication.
    FirstPubDecade,
    /// Every decade in which the author published.
    ActiveDecade,
}

impl Cohort {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "first_pub_decade" | "first" => Some(Cohort::FirstPubDecade),
            "active_decade" | "active" => Some(Cohort::ActiveDecade),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohortPoint {
    pub decade: i32,
    pub fraction: f64,
    pub n: usize,
}

pub fn fox_fraction_by_cohort<T>(profiles: &[AuthorProfile<T>], cohort: Cohort) -> Vec<CohortPoint> {
    let mut tally: BTreeMap<i32, (usize, usize)> = BTreeMap::new();
    for p in profiles {
        let fox = usize::from(p.style == Style::Fox);
        let mut bump = |d: i32| {
            let e = tally.entry(d).or_default();
            e.0 += fox;
            e.1 += 1;
        };
        match cohort {
            Cohort::FirstPubDecade => bump(decade_of(p.first_pub_year)),
            Cohort::ActiveDecade => p.active_decades.iter().for_each(|&d| bump(d)),
        }
    }
    tally
        .into_iter()
        .map(|(decade, (fox, n))| CohortPoint {
            decade,
            fraction: fox as f64 / n as f64,
            n,
        })
        .collect()
}

pub fn mean_distinct_fields<T>(profiles: &[AuthorProfile<T>]) -> Result<f64> {
    if profiles.is_empty() {
        return Err(Error::EmptyCohort);
    }
    Ok(profiles.iter().map(|p| p.distinct_fields as f64).sum::<f64>() / profiles.len() as f64)
}

/// Index from author id to profile.
pub struct ProfileIndex<'a, T> {
    slots: Vec<Option<&'a AuthorProfile<T>>>,
}

impl<'a, T> ProfileIndex<'a, T> {
    pub fn new(profiles: &'a [AuthorProfile<T>], n_authors: usize) -> Self {
        let mut slots = vec![None; n_authors];
        for p in profiles {
            slots[p.author.index()] = Some(p);
        }
        Self { slots }
    }

    pub fn get(&self, a: AuthorId) -> Option<&'a AuthorProfile<T>> {
        self.slots.get(a.index()).copied().flatten()
    }
}
