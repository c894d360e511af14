//! Disruption (D) index over the citation graph.
//!
//! For a focal paper with in-corpus references R, consider the later papers
//! (the citer universe) other than the focal itself:
//!
//! * `n_i` cite the focal but nothing in R,
//! * `n_j` cite the focal and at least one paper in R,
//! * `n_k` cite something in R but not the focal,
//!
//! and `D = (n_i - n_j) / (n_i + n_j + n_k)`, undefined when the denominator
//! is zero. Out-of-corpus references are not part of R.
//!
//! Every count comes from one pass over the focal's citers and the citers of
//! each reference, using the reverse citation index.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::ids::PaperId;
use crate::scalar::Fraction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisruptionScore<T> {
    pub paper: PaperId,
    /// Zero when undefined.
    pub d: T,
    pub n_i: u32,
    pub n_j: u32,
    pub n_k: u32,
    pub defined: bool,
}

impl<T: Fraction> DisruptionScore<T> {
    pub fn from_counts(paper: PaperId, n_i: u32, n_j: u32, n_k: u32) -> Self {
        let total = i64::from(n_i) + i64::from(n_j) + i64::from(n_k);
        let defined = total > 0;
        let d = if defined {
            T::from_counts(i64::from(n_i) - i64::from(n_j), total)
        } else {
            T::zero()
        };
        Self {
            paper,
            d,
            n_i,
            n_j,
            n_k,
            defined,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisruptionOptions {
    /// Count papers from the focal's own publication year as citers.
    pub include_same_year: bool,
}

impl Default for DisruptionOptions {
    fn default() -> Self {
        Self {
            include_same_year: true,
        }
    }
}

impl DisruptionOptions {
    #[inline]
    fn in_universe(&self, focal_year: i32, year: i32) -> bool {
        year > focal_year || (self.include_same_year && year == focal_year)
    }
}

/// Reusable marks so repeated focal computations never clear a buffer.
struct Scratch {
    stamp: Vec<u32>,
    current: u32,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Self {
            stamp: vec![0; n],
            current: 0,
        }
    }

    fn next(&mut self) -> u32 {
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.current = 1;
        }
        self.current
    }
}

fn compute<T: Fraction>(
    corpus: &Corpus,
    focal: PaperId,
    opts: DisruptionOptions,
    scratch: &mut Scratch,
) -> DisruptionScore<T> {
    let fy = corpus.paper(focal).year;
    let mark = scratch.next();
    let mut ref_citers = 0u32;
    for &r in corpus.references(focal) {
        for &c in corpus.citers(r) {
            if c == focal || !opts.in_universe(fy, corpus.paper(c).year) {
                continue;
            }
            let s = &mut scratch.stamp[c.index()];
            if *s != mark {
                *s = mark;
                ref_citers += 1;
            }
        }
    }
    let (mut n_i, mut n_j) = (0u32, 0u32);
    for &c in corpus.citers(focal) {
        if !opts.in_universe(fy, corpus.paper(c).year) {
            continue;
        }
        if scratch.stamp[c.index()] == mark {
            n_j += 1;
        } else {
            n_i += 1;
        }
    }
    DisruptionScore::from_counts(focal, n_i, n_j, ref_citers - n_j)
}

pub fn disruption<T: Fraction>(
    corpus: &Corpus,
    focal: PaperId,
    opts: DisruptionOptions,
) -> Result<DisruptionScore<T>> {
    if focal.index() >= corpus.papers().len() {
        return Err(Error::UnknownPaper(focal.to_string()));
    }
    Ok(compute(corpus, focal, opts, &mut Scratch::new(corpus.papers().len())))
}

pub fn disruption_by_key<T: Fraction>(
    corpus: &Corpus,
    key: &str,
    opts: DisruptionOptions,
) -> Result<DisruptionScore<T>> {
    let id = corpus
        .paper_by_key(key)
        .ok_or_else(|| Error::UnknownPaper(key.to_string()))?;
    disruption(corpus, id, opts)
}

/// D for every paper, in paper id order.
pub fn disruption_all<T: Fraction>(corpus: &Corpus, opts: DisruptionOptions) -> Vec<DisruptionScore<T>> {
    let n = corpus.papers().len();
    (0..n)
        .into_par_iter()
        .map_init(
            || Scratch::new(n),
            |scratch, i| compute(corpus, PaperId::from_index(i), opts, scratch),
        )
        .collect()
}

/// Flag the top `pct` percent of defined scores.
///
/// With N defined scores the cut is the value at descending nearest rank
/// `ceil(pct / 100 * N)`; every defined score at or above it is flagged, so
/// ties at the cut are all flagged.
pub fn top_percentile_flags<T: Fraction>(scores: &[DisruptionScore<T>], pct: f64) -> Result<Vec<bool>> {
    let mut defined: Vec<T> = scores.iter().filter(|s| s.defined).map(|s| s.d).collect();
    if defined.is_empty() {
        return Err(Error::NoDefinedScores);
    }
    defined.sort_by(|a, b| b.partial_cmp(a).expect("finite scores"));
    let n = defined.len();
    let rank = ((pct / 100.0 * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    let cut = defined[rank - 1];
    Ok(scores.iter().map(|s| s.defined && s.d >= cut).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CorpusBuilder, RawAuthorship, RawFieldScore, RawWork};
    use num_rational::Ratio;

    fn work(id: &str, year: i32, refs: &[&str]) -> RawWork {
        RawWork {
            id: id.into(),
            publication_year: year,
            venue: None,
            authorships: vec![RawAuthorship {
                author_id: format!("a-{id}"),
                position: 0,
            }],
            referenced_works: refs.iter().map(|s| s.to_string()).collect(),
            fields: vec![RawFieldScore {
                id: "F1".into(),
                score: 1.0,
                level: None,
            }],
        }
    }

    fn corpus(works: Vec<RawWork>) -> Corpus {
        let mut b = CorpusBuilder::new("fixture");
        for (i, w) in works.into_iter().enumerate() {
            b.push(i + 1, w);
        }
        b.build().unwrap()
    }

    fn d_of(c: &Corpus, key: &str) -> DisruptionScore<Ratio<i64>> {
        disruption_by_key(c, key, DisruptionOptions::default()).unwrap()
    }

    #[test]
    fn pure_displacement() {
        let c = corpus(vec![
            work("r", 1990, &[]),
            work("f", 2000, &["r"]),
            work("c1", 2001, &["f"]),
            work("c2", 2002, &["f"]),
        ]);
        let s = d_of(&c, "f");
        assert_eq!((s.n_i, s.n_j, s.n_k), (2, 0, 0));
        assert_eq!(s.d, Ratio::from_integer(1));
    }

    #[test]
    fn balanced_is_zero() {
        let c = corpus(vec![
            work("r", 1990, &[]),
            work("f", 2000, &["r"]),
            work("c1", 2001, &["f"]),
            work("c2", 2002, &["f", "r"]),
        ]);
        let s = d_of(&c, "f");
        assert_eq!((s.n_i, s.n_j, s.n_k), (1, 1, 0));
        assert_eq!(s.d, Ratio::from_integer(0));
    }

    #[test]
    fn pure_consolidation() {
        let c = corpus(vec![
            work("r", 1990, &[]),
            work("f", 2000, &["r"]),
            work("c1", 2001, &["f", "r"]),
        ]);
        assert_eq!(d_of(&c, "f").d, Ratio::from_integer(-1));
    }

    #[test]
    fn undefined_without_citers() {
        let c = corpus(vec![work("r", 1990, &[]), work("f", 2000, &["r"])]);
        let s = d_of(&c, "f");
        assert!(!s.defined);
        assert_eq!(s.d, Ratio::from_integer(0));
    }

    #[test]
    fn same_year_citers_toggle() {
        let c = corpus(vec![
            work("r", 1990, &[]),
            work("f", 2000, &["r"]),
            work("same", 2000, &["r"]),
            work("c1", 2001, &["f"]),
        ]);
        let with = d_of(&c, "f");
        assert_eq!((with.n_i, with.n_j, with.n_k), (1, 0, 1));
        let without: DisruptionScore<f64> = disruption_by_key(
            &c,
            "f",
            DisruptionOptions {
                include_same_year: false,
            },
        )
        .unwrap();
        assert_eq!((without.n_i, without.n_j, without.n_k), (1, 0, 0));
    }

    #[test]
    fn earlier_papers_are_not_citers() {
        // r2 (1995) cites r but predates the focal
        let c = corpus(vec![
            work("r", 1990, &[]),
            work("r2", 1995, &["r"]),
            work("f", 2000, &["r"]),
            work("c1", 2001, &["f"]),
        ]);
        let s = d_of(&c, "f");
        assert_eq!((s.n_i, s.n_j, s.n_k), (1, 0, 0));
    }

    #[test]
    fn unknown_focal() {
        let c = corpus(vec![work("r", 1990, &[])]);
        assert!(matches!(
            disruption_by_key::<f64>(&c, "nope", DisruptionOptions::default()),
            Err(Error::UnknownPaper(_))
        ));
    }

    fn scores(ds: &[f64]) -> Vec<DisruptionScore<f64>> {
        ds.iter()
            .enumerate()
            .map(|(i, &d)| DisruptionScore {
                paper: PaperId::from_index(i),
                d,
                n_i: 1,
                n_j: 0,
                n_k: 0,
                defined: true,
            })
            .collect()
    }

    #[test]
    fn top_five_of_hundred() {
        let ds: Vec<f64> = (0..100).map(|i| i as f64 / 100.0 - 0.5).collect();
        let flags = top_percentile_flags(&scores(&ds), 5.0).unwrap();
        assert_eq!(flags.iter().filter(|&&f| f).count(), 5);
        assert!(flags[95..].iter().all(|&f| f));
    }

    #[test]
    fn ties_at_cut_are_all_flagged() {
        let mut ds: Vec<f64> = (0..100).map(|i| i as f64 / 1000.0).collect();
        for d in ds.iter_mut().skip(90) {
            *d = 0.5;
        }
        let flags = top_percentile_flags(&scores(&ds), 5.0).unwrap();
        assert_eq!(flags.iter().filter(|&&f| f).count(), 10);
    }

    #[test]
    fn undefined_scores_never_flagged() {
        let mut s = scores(&[0.1, 0.2, 0.3]);
        s[2].defined = false;
        let flags = top_percentile_flags(&s, 5.0).unwrap();
        assert_eq!(flags, vec![false, true, false]);
        for x in s.iter_mut() {
            x.defined = false;
        }
        assert!(matches!(top_percentile_flags(&s, 5.0), Err(Error::NoDefinedScores)));
    }

    #[test]
    fn adding_focal_only_citer_never_lowers_d() {
        let base = vec![
            work("r", 1990, &[]),
            work("f", 2000, &["r"]),
            work("c1", 2001, &["f", "r"]),
            work("c2", 2001, &["r"]),
        ];
        let before = d_of(&corpus(base.clone()), "f").d;
        let mut more = base;
        more.push(work("c3", 2003, &["f"]));
        let after = d_of(&corpus(more), "f").d;
        assert!(after >= before);
    }

    #[test]
    fn adding_reference_only_citer_lowers_d() {
        let base = vec![
            work("r", 1990, &[]),
            work("f", 2000, &["r"]),
            work("c1", 2001, &["f"]),
        ];
        let before = d_of(&corpus(base.clone()), "f");
        let mut more = base;
        more.push(work("c2", 2003, &["r"]));
        let after = d_of(&corpus(more), "f");
        assert!(after.d < before.d);
        assert_eq!(after.n_i - after.n_j, before.n_i - before.n_j);
    }
}
