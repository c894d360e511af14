//! Atypicality (A) index: how unexpected a paper's combinations of cited
//! journals are.
//!
//! For each citing year, journal-pair co-citation counts are compared with
//! the same counts in randomized networks (see [`CitationNetwork::randomize`]).
//! Each pair gets `z = (observed - null_mean) / null_sd`; a paper's score is
//! the negated low-tail summary of its pairs' z, so a higher A means more
//! surprising combinations.

mod network;

use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use network::{
    venue_pairs, CitationNetwork, JournalPairKey, PairCounts, StratumSwaps,
    SwapDiagnostics,
};

use crate::corpus::{Corpus, PaperRecord};
use crate::ids::PaperId;
use crate::scalar::Scalar;
pub use crate::seed::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStatistics<T> {
    pub key: JournalPairKey,
    pub observed: u32,
    pub null_mean: T,
    pub null_sd: T,
    /// `None` when the null distribution has zero spread.
    pub z: Option<T>,
}

impl<T> PairStatistics<T> {
    pub fn degenerate(&self) -> bool {
        self.z.is_none()
    }
}

pub type PairTable<T> = BTreeMap<JournalPairKey, PairStatistics<T>>;

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Summary {
    #[default]
    TenthPercentile,
    Median,
}

impl Summary {
    pub fn as_str(self) -> &'static str {
        match self {
            Summary::TenthPercentile => "p10",
            Summary::Median => "median",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "p10" | "tenth_percentile" | "tenth" => Some(Summary::TenthPercentile),
            "median" | "p50" => Some(Summary::Median),
            _ => None,
        }
    }

    fn percentile(self) -> f64 {
        match self {
            Summary::TenthPercentile => 10.0,
            Summary::Median => 50.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtypicalityScore<T> {
    pub paper: PaperId,
    /// Zero when undefined.
    pub a: T,
    pub summary: Summary,
    pub n_pairs: usize,
    pub defined: bool,
}

/// Pair counts over the papers published in `year`.
pub fn observed_pair_counts(corpus: &Corpus, year: i32) -> PairCounts {
    CitationNetwork::for_year(corpus, year).0.pair_counts()
}

/// One randomized network for `year`, returned as pair counts.
pub fn null_model_sample(
    corpus: &Corpus,
    year: i32,
    seed: u64,
    swaps_per_edge: usize,
) -> (PairCounts, SwapDiagnostics) {
    let (mut net, _) = CitationNetwork::for_year(corpus, year);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diag = net.randomize(&mut rng, swaps_per_edge);
    (net.pair_counts(), diag)
}

/// Null mean, population sd and z for every pair seen in the observed
/// counts or any sample. Pairs absent from a sample count zero there.
pub fn pair_zscores<T: Scalar>(observed: &PairCounts, samples: &[PairCounts]) -> PairTable<T> {
    let keys: BTreeSet<JournalPairKey> = observed
        .keys()
        .chain(samples.iter().flat_map(|s| s.keys()))
        .copied()
        .collect();
    keys.into_iter()
        .map(|key| {
            let obs = observed.get(&key).copied().unwrap_or(0);
            let m = Moments::of(samples.iter().map(|s| s.get(&key).copied().unwrap_or(0)));
            let (null_mean, null_sd, z) = m.stats::<T>(obs, samples.len());
            (
                key,
                PairStatistics {
                    key,
                    observed: obs,
                    null_mean,
                    null_sd,
                    z,
                },
            )
        })
        .collect()
}

/// Integer sums of sample counts, so mean and variance are exact until the
/// final division.
#[derive(Copy, Clone, Default)]
struct Moments {
    sum: u64,
    sumsq: u64,
}

impl Moments {
    fn of(values: impl Iterator<Item = u32>) -> Self {
        let mut m = Self::default();
        values.for_each(|v| m.add(v));
        m
    }

    fn add(&mut self, v: u32) {
        self.sum += u64::from(v);
        self.sumsq += u64::from(v) * u64::from(v);
    }

    /// `(mean, population sd, z)` over `n` samples.
    fn stats<T: Scalar>(self, obs: u32, n: usize) -> (T, T, Option<T>) {
        let n = n.max(1) as i128;
        let (sum, sumsq) = (i128::from(self.sum), i128::from(self.sumsq));
        let spread = n * sumsq - sum * sum;
        let nt = T::of_i128(n);
        let mean = T::of_i128(sum) / nt;
        let sd = T::of_i128(spread).sqrt() / nt;
        let z = (spread > 0).then(|| T::of_i128(n * i128::from(obs) - sum) / T::of_i128(spread).sqrt());
        (mean, sd, z)
    }
}

/// Sorted pair codes of one year and their z values.
struct CodeTable<T> {
    codes: Vec<u64>,
    z: Vec<Option<T>>,
}

impl<T: Scalar> CodeTable<T> {
    fn build(observed: &[(u64, u32)], samples: &[Vec<(u64, u32)>]) -> Self {
        let mut codes: Vec<u64> = observed
            .iter()
            .chain(samples.iter().flatten())
            .map(|&(c, _)| c)
            .collect();
        codes.sort_unstable();
        codes.dedup();
        let mut moments = vec![Moments::default(); codes.len()];
        for sample in samples {
            let mut i = 0;
            for &(c, v) in sample {
                while codes[i] != c {
                    i += 1;
                }
                moments[i].add(v);
            }
        }
        let mut obs = vec![0u32; codes.len()];
        let mut i = 0;
        for &(c, v) in observed {
            while codes[i] != c {
                i += 1;
            }
            obs[i] = v;
        }
        let z = moments
            .iter()
            .zip(&obs)
            .map(|(m, &o)| m.stats::<T>(o, samples.len()).2)
            .collect();
        Self { codes, z }
    }

    fn get(&self, code: u64) -> Option<T> {
        self.codes.binary_search(&code).ok().and_then(|i| self.z[i])
    }
}

/// Nearest-rank percentile of a non-empty slice.
pub fn nearest_rank<T: Scalar>(values: &mut [T], pct: f64) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    nearest_rank_sorted(values, pct)
}

fn nearest_rank_sorted<T: Copy>(sorted: &[T], pct: f64) -> T {
    let n = sorted.len();
    let rank = ((pct / 100.0 * n as f64) - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    sorted[rank - 1]
}

fn score_sorted<T: Scalar>(paper: PaperId, sorted: &[T], summary: Summary) -> AtypicalityScore<T> {
    if sorted.is_empty() {
        return AtypicalityScore {
            paper,
            a: T::zero(),
            summary,
            n_pairs: 0,
            defined: false,
        };
    }
    AtypicalityScore {
        paper,
        a: -nearest_rank_sorted(sorted, summary.percentile()),
        summary,
        n_pairs: sorted.len(),
        defined: true,
    }
}

/// Distinct venue pairs of a paper's in-corpus references.
pub fn paper_pairs(corpus: &Corpus, paper: &PaperRecord) -> Vec<JournalPairKey> {
    let mut venues: Vec<_> = paper
        .references
        .iter()
        .filter_map(|&r| corpus.paper(r).venue)
        .collect();
    let mut out = Vec::new();
    venue_pairs(&mut venues, paper.year, |k| out.push(k));
    out
}

/// Score a set of pair keys against a pair table.
pub fn atypicality_of<T: Scalar>(
    paper: PaperId,
    pairs: &[JournalPairKey],
    table: &PairTable<T>,
    summary: Summary,
) -> AtypicalityScore<T> {
    let mut zs: Vec<T> = pairs
        .iter()
        .filter_map(|k| table.get(k).and_then(|s| s.z))
        .collect();
    zs.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    score_sorted(paper, &zs, summary)
}

pub fn atypicality<T: Scalar>(
    corpus: &Corpus,
    paper: &PaperRecord,
    table: &PairTable<T>,
    summary: Summary,
) -> AtypicalityScore<T> {
    atypicality_of(paper.id, &paper_pairs(corpus, paper), table, summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullModelConfig {
    pub samples: usize,
    pub swaps_per_edge: usize,
    pub seed: u64,
    pub summary: Summary,
}

impl Default for NullModelConfig {
    fn default() -> Self {
        Self {
            samples: 10,
            swaps_per_edge: 10,
            seed: 0,
            summary: Summary::TenthPercentile,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YearDiagnostics {
    pub year: i32,
    pub edges: usize,
    pub citing_papers: usize,
    /// Summed over samples, keyed by cited-year stratum.
    pub swaps: SwapDiagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtypicalityRun<T> {
    /// Primary summary, in paper id order.
    pub scores: Vec<AtypicalityScore<T>>,
    /// The other summary, for sensitivity reporting.
    pub alternative: Vec<AtypicalityScore<T>>,
    pub diagnostics: Vec<YearDiagnostics>,
}

/// Score every paper. Sample `i` of year `y` is seeded with
/// `derive_seed(seed, y, i)`, so results do not depend on scheduling.
pub fn compute_atypicality<T: Scalar>(corpus: &Corpus, cfg: &NullModelConfig) -> AtypicalityRun<T> {
    let years: BTreeSet<i32> = corpus.papers().iter().map(|p| p.year).collect();
    let alt = match cfg.summary {
        Summary::TenthPercentile => Summary::Median,
        Summary::Median => Summary::TenthPercentile,
    };
    let per_year: Vec<_> = years
        .into_par_iter()
        .map(|year| {
            let (net, citing) = CitationNetwork::for_year(corpus, year);
            let observed = net.pair_code_counts();
            let runs: Vec<(Vec<(u64, u32)>, SwapDiagnostics)> = (0..cfg.samples)
                .into_par_iter()
                .map(|i| {
                    let mut n = net.clone();
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, year as u64, i as u64));
                    let d = n.randomize(&mut rng, cfg.swaps_per_edge);
                    (n.pair_code_counts(), d)
                })
                .collect();
            let mut swaps = SwapDiagnostics::new();
            let mut samples = Vec::with_capacity(runs.len());
            for (counts, d) in runs {
                for (y, s) in d {
                    let e = swaps.entry(y).or_default();
                    e.attempted += s.attempted;
                    e.accepted += s.accepted;
                }
                samples.push(counts);
            }
            let table = CodeTable::<T>::build(&observed, &samples);
            drop(samples);
            let mut venues = Vec::new();
            let mut codes = Vec::new();
            let mut zs = Vec::new();
            let scored: Vec<_> = citing
                .iter()
                .enumerate()
                .map(|(k, &p)| {
                    codes.clear();
                    net.node_pair_codes(k, &mut venues, &mut codes);
                    zs.clear();
                    zs.extend(codes.iter().filter_map(|&c| table.get(c)));
                    zs.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
                    (score_sorted(p, &zs, cfg.summary), score_sorted(p, &zs, alt))
                })
                .collect();
            let diag = YearDiagnostics {
                year,
                edges: net.n_edges(),
                citing_papers: net.n_citing(),
                swaps,
            };
            (scored, diag)
        })
        .collect();

    let n = corpus.papers().len();
    let mut scores: Vec<Option<AtypicalityScore<T>>> = vec![None; n];
    let mut alternative: Vec<Option<AtypicalityScore<T>>> = vec![None; n];
    let mut diagnostics = Vec::new();
    for (scored, diag) in per_year {
        for (s, a) in scored {
            let i = s.paper.index();
            scores[i] = Some(s);
            alternative[i] = Some(a);
        }
        diagnostics.push(diag);
    }
    AtypicalityRun {
        scores: scores.into_iter().map(Option::unwrap).collect(),
        alternative: alternative.into_iter().map(Option::unwrap).collect(),
        diagnostics,
    }
}
